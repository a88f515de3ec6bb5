import { ApiClient } from "./api.js";
import { App } from "./app.js";

const root = document.getElementById("app");
if (!root) throw new Error("missing #app container");

// served under /ui by the session service, so the API lives one level up
const base = location.pathname.startsWith("/ui") ? "" : location.origin;
new App(root, new ApiClient({ baseUrl: base, token: localStorage.getItem("scsimToken") }));
