// Browser entry point: mount the console on #app against the same origin.

import { App } from "./app.js";

const root = document.getElementById("app");
if (root !== null) {
  void new App(root, "").run();
}
