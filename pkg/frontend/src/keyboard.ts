/** Keyboard shortcuts: accept, reject, pick a category by number. */

export type Action =
  | { type: "accept" }
  | { type: "reject" }
  | { type: "category"; index: number }
  | { type: "cancel" }
  | { type: "export" };

export function actionFor(key: string): Action | null {
  if (key === "+" || key === "a") return { type: "accept" };
  if (key === "-" || key === "x") return { type: "reject" };
  if (key === "Escape") return { type: "cancel" };
  if (key === "e") return { type: "export" };
  if (/^[1-9]$/.test(key)) return { type: "category", index: Number(key) - 1 };
  return null;
}
