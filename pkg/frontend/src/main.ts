import { Dashboard } from "./dashboard.js";

const root = document.getElementById("app");
if (root) {
  const api = new URLSearchParams(location.search).get("api") ?? "";
  const dashboard = new Dashboard(root, { baseUrl: api });
  dashboard.start();
}
