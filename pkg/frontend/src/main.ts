// Browser entry point. The API origin comes from ?api=... or defaults to the
// page origin; the identity token persists in localStorage.

import { ApiClient } from "./api.js";
import { AppController } from "./controller.js";
import { DomRenderer } from "./render.js";

const TOKEN_KEY = "flexdesk-token";

function main(): void {
  const params = new URLSearchParams(window.location.search);
  const baseUrl = params.get("api") ?? window.location.origin;
  const api = new ApiClient(baseUrl);
  const stored = window.localStorage.getItem(TOKEN_KEY);
  if (stored) api.token = stored;

  const root = document.getElementById("app");
  if (!root) throw new Error("missing #app mount point");
  const renderer = new DomRenderer(root);
  const controller = new AppController(api, renderer, {
    onToken: (token) => window.localStorage.setItem(TOKEN_KEY, token),
  });
  renderer.attach(controller);
  void controller.boot().then(() => controller.startPolling());
}

main();
