/** DOM renderer: draws the current session state into the page root and
 * wires buttons to session actions.  All state lives in the store. */

import type { ReviewSession } from "./store.ts";
import { buildCard } from "./view.ts";

function el(tag: string, className: string, text?: string): HTMLElement {
  const node = document.createElement(tag);
  node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

export function render(session: ReviewSession, root: HTMLElement): void {
  root.textContent = "";

  const header = el("header", "bar");
  const info = session.info;
  header.appendChild(
    el("span", "title",
       info ? `${info.dataset} / ${info.model}` : "loading session"),
  );
  header.appendChild(
    el("span", "progress", `${session.judged} / ${session.total} judged`),
  );
  if (session.offline) {
    const banner = el("span", "offline",
      `offline, ${session.pendingUploads()} judgement(s) queued`);
    header.appendChild(banner);
  }
  root.appendChild(header);

  if (session.notice) {
    root.appendChild(el("div", "notice", session.notice));
  }

  if (session.exportResult) {
    const summary = session.exportResult;
    const box = el("div", "export");
    box.appendChild(el("h2", "", `gold dataset: ${summary.gold}`));
    box.appendChild(
      el("p", "", `${summary.added.length} triple(s) added, ` +
        `${summary.removed.length} removed, ` +
        `${summary.dropped_entities.length} example(s) dropped`),
    );
    root.appendChild(box);
    return;
  }

  const item = session.current();
  if (!item) {
    const doneBox = el("div", "done");
    doneBox.appendChild(el("h2", "", "session complete"));
    const exportButton = el("button", "primary", "export gold dataset");
    exportButton.addEventListener("click", () => void session.exportGold());
    doneBox.appendChild(exportButton);
    root.appendChild(doneBox);
    return;
  }

  const card = buildCard(item);
  const cardBox = el("div", "card");
  const head = el("div", "card-head");
  head.appendChild(el("span", `badge ${card.kind.toLowerCase()}`, card.kind));
  head.appendChild(el("span", "kind-label", card.kindLabel));
  head.appendChild(el("span", "entity", card.entity));
  cardBox.appendChild(head);

  const triple = el("div", "triple");
  triple.appendChild(el("span", "predicate", card.predicate));
  triple.appendChild(el("span", "value", `"${card.value}"`));
  triple.appendChild(el("span", "datatype", card.datatype));
  triple.appendChild(
    el("span", card.found ? "found" : "not-found",
       card.found ? "value found in abstract" : "value not found in abstract"),
  );
  cardBox.appendChild(triple);

  const abstractBox = el("p", "abstract");
  for (const segment of card.abstractSegments) {
    if (segment.hit) {
      abstractBox.appendChild(el("mark", "hit", segment.text));
    } else {
      abstractBox.appendChild(document.createTextNode(segment.text));
    }
  }
  cardBox.appendChild(abstractBox);

  const expected = el("table", "expected");
  for (const t of card.expected) {
    const row = el("tr", t.isCandidate ? "candidate" : "");
    row.appendChild(el("td", "", t.p));
    row.appendChild(el("td", "", t.o));
    row.appendChild(el("td", "dt", t.dt));
    expected.appendChild(row);
  }
  cardBox.appendChild(expected);

  const controls = el("div", "controls");
  const accept = el("button", "accept", "correct (+)");
  accept.addEventListener("click", () => void session.judge("+"));
  const reject = el("button", "reject", "wrong (−)");
  reject.addEventListener("click", () => void session.beginReject());
  controls.appendChild(accept);
  controls.appendChild(reject);
  cardBox.appendChild(controls);

  if (session.awaitingCategory) {
    const picker = el("div", "picker");
    picker.appendChild(el("p", "", "pick an error category:"));
    session.categories.forEach((category, index) => {
      const button = el("button", "category",
                        `${index + 1} ${category.code}`);
      button.title = category.description;
      button.addEventListener("click", () => void session.chooseCategory(index));
      picker.appendChild(button);
    });
    cardBox.appendChild(picker);
  }

  root.appendChild(cardBox);
}
