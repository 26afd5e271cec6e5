/** Client session state: the pending queue, optimistic judgements with
 * rollback, the offline outbox, and gold export.
 *
 * The store never invents or edits triple values; it only records verdicts
 * on items exactly as the server sent them.
 */

import type { ReviewApi } from "./api.ts";
import { NetworkError } from "./api.ts";
import { Outbox } from "./outbox.ts";
import type {
  Category,
  GoldCorrection,
  JudgementPayload,
  Polarity,
  ReviewItem,
  SessionInfo,
} from "./types.ts";

export type JudgeOutcome =
  | { kind: "accepted" }
  | { kind: "queued" }
  | { kind: "conflict"; message: string }
  | { kind: "rejected"; message: string }
  | { kind: "blocked"; message: string };

export class ReviewSession {
  info: SessionInfo | null = null;
  categories: Category[] = [];
  queue: ReviewItem[] = [];
  judged = 0;
  total = 0;
  offline = false;
  notice: string | null = null;
  awaitingCategory = false;
  exportResult: GoldCorrection | null = null;
  onChange: () => void = () => {};

  constructor(private api: ReviewApi, private outbox: Outbox = new Outbox()) {}

  private changed(): void {
    this.onChange();
  }

  async load(limit = 500): Promise<void> {
    this.info = await this.api.session();
    this.categories = await this.api.categories();
    this.queue = await this.api.items("pending", limit);
    this.total = this.info.total;
    this.judged = this.info.judged;
    this.offline = false;
    this.changed();
  }

  current(): ReviewItem | null {
    return this.queue[0] ?? null;
  }

  done(): boolean {
    return this.queue.length === 0;
  }

  /** A category is required exactly when rejecting a false positive. */
  needsCategory(polarity: Polarity): boolean {
    const item = this.current();
    return !!item && item.kind === "FP" && polarity === "-";
  }

  /** "-" pressed: either submit directly (FN) or open the category picker. */
  async beginReject(): Promise<JudgeOutcome | null> {
    if (!this.current()) return null;
    if (this.needsCategory("-")) {
      this.awaitingCategory = true;
      this.changed();
      return null;
    }
    return this.judge("-");
  }

  async chooseCategory(index: number): Promise<JudgeOutcome | null> {
    if (!this.awaitingCategory) return null;
    const category = this.categories[index];
    if (!category) return null;
    this.awaitingCategory = false;
    return this.judge("-", category.code);
  }

  cancelReject(): void {
    this.awaitingCategory = false;
    this.changed();
  }

  async judge(polarity: Polarity, category?: string): Promise<JudgeOutcome> {
    const item = this.current();
    if (!item) return { kind: "blocked", message: "the queue is empty" };
    if (this.needsCategory(polarity) && !category) {
      this.notice = "an erroneous false positive needs an error category";
      this.changed();
      return { kind: "blocked", message: this.notice };
    }
    if (!this.needsCategory(polarity)) category = undefined;

    // optimistic: advance immediately, keep a snapshot for rollback
    this.queue.shift();
    this.judged += 1;
    this.notice = null;
    this.awaitingCategory = false;
    this.changed();

    const payload: JudgementPayload = { itemId: item.id, polarity, category };
    let result;
    try {
      result = await this.api.judge(item.id, polarity, category);
    } catch (err) {
      if (err instanceof NetworkError) {
        // keep the optimistic state; deliver once the connection is back
        this.outbox.push(payload);
        this.offline = true;
        this.changed();
        return { kind: "queued" };
      }
      throw err;
    }
    if (result.ok) {
      this.offline = false;
      this.changed();
      return { kind: "accepted" };
    }
    // roll the optimistic update back
    this.queue.unshift(item);
    this.judged -= 1;
    this.notice = result.message;
    this.changed();
    if (result.status === 409) return { kind: "conflict", message: result.message };
    return { kind: "rejected", message: result.message };
  }

  pendingUploads(): number {
    return this.outbox.size;
  }

  /** Retry queued judgements; returns true when the outbox is clear. */
  async flush(): Promise<boolean> {
    const report = await this.outbox.drain(async (payload) => {
      try {
        const result = await this.api.judge(
          payload.itemId, payload.polarity, payload.category,
        );
        if (result.ok) return "ok";
        // judged elsewhere or invalid: local state already advanced, drop it
        return "drop";
      } catch (err) {
        if (err instanceof NetworkError) return "retry";
        throw err;
      }
    });
    this.offline = report.kept > 0;
    this.changed();
    return report.kept === 0;
  }

  async exportGold(): Promise<GoldCorrection | null> {
    let result;
    try {
      result = await this.api.exportGold();
    } catch (err) {
      if (err instanceof NetworkError) {
        this.offline = true;
        this.notice = "cannot export while offline";
        this.changed();
        return null;
      }
      throw err;
    }
    if (!result.ok) {
      this.notice =
        result.status === 409
          ? "items are still pending; finish the queue first"
          : `export failed (${result.status})`;
      this.changed();
      return null;
    }
    this.exportResult = result.body;
    this.notice = null;
    this.changed();
    return result.body;
  }
}
