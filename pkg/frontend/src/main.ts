import { ApiClient } from "./api.js";
import { bootstrap } from "./app.js";

document.addEventListener("DOMContentLoaded", () => {
  bootstrap(document, new ApiClient(""));
});
