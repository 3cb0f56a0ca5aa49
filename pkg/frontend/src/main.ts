import { App, websocketTransport } from "./app.js";

const url = `${location.protocol === "https:" ? "wss" : "ws"}://${location.host}/ws`;
const app = new App(websocketTransport(url));
document.getElementById("root")!.appendChild(app.root);
app.render();
