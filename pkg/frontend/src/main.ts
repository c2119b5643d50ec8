import { WorkbenchClient } from "./api.js";
import { Workbench } from "./view.js";

const root = document.getElementById("app");
if (!root) throw new Error("missing #app container");

new Workbench(new WorkbenchClient(), root).start();
