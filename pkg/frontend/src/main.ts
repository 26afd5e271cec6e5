import { ApiClient } from "./api.ts";
import { render } from "./dom.ts";
import { actionFor } from "./keyboard.ts";
import { browserKV, Outbox } from "./outbox.ts";
import { ReviewSession } from "./store.ts";

const root = document.getElementById("app");
if (!root) throw new Error("missing #app element");

const session = new ReviewSession(new ApiClient(""), new Outbox(browserKV()));
session.onChange = () => render(session, root);

window.addEventListener("keydown", (event) => {
  const target = event.target as HTMLElement | null;
  if (target && ["INPUT", "TEXTAREA", "SELECT"].includes(target.tagName)) return;
  const action = actionFor(event.key);
  if (!action) return;
  event.preventDefault();
  if (action.type === "accept") void session.judge("+");
  else if (action.type === "reject") void session.beginReject();
  else if (action.type === "category") void session.chooseCategory(action.index);
  else if (action.type === "cancel") session.cancelReject();
  else if (action.type === "export" && session.done()) void session.exportGold();
});

// periodically retry queued judgements while offline
setInterval(() => {
  if (session.pendingUploads() > 0) void session.flush();
}, 4000);

void session.load().catch((err) => {
  root.textContent = `cannot reach the review API: ${err}`;
});
