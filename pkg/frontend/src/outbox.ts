/** Offline outbox: judgements that could not reach the server yet.
 *
 * The queue is the only client-side persistence in the app.  It survives
 * reloads through any string key-value backend (localStorage in the
 * browser, memory in tests) and drains in FIFO order once the connection
 * is back.
 */

import type { JudgementPayload } from "./types.ts";

export interface KV {
  get(): string | null;
  set(value: string): void;
}

export class MemoryKV implements KV {
  private value: string | null = null;
  get(): string | null {
    return this.value;
  }
  set(value: string): void {
    this.value = value;
  }
}

export function browserKV(key = "shaperex-outbox"): KV {
  try {
    const storage = globalThis.localStorage;
    storage.getItem(key);
    return {
      get: () => storage.getItem(key),
      set: (value) => storage.setItem(key, value),
    };
  } catch {
    return new MemoryKV();
  }
}

/** What the sender reports per payload: delivered, rejected for good
 * (conflict/validation: drop it), or worth retrying later. */
export type SendOutcome = "ok" | "drop" | "retry";

export interface DrainReport {
  sent: number;
  dropped: number;
  kept: number;
}

export class Outbox {
  constructor(private kv: KV = new MemoryKV()) {}

  list(): JudgementPayload[] {
    const raw = this.kv.get();
    if (!raw) return [];
    try {
      return JSON.parse(raw) as JudgementPayload[];
    } catch {
      return [];
    }
  }

  get size(): number {
    return this.list().length;
  }

  push(payload: JudgementPayload): void {
    const queue = this.list();
    queue.push(payload);
    this.kv.set(JSON.stringify(queue));
  }

  async drain(send: (payload: JudgementPayload) => Promise<SendOutcome>): Promise<DrainReport> {
    const queue = this.list();
    const kept: JudgementPayload[] = [];
    let sent = 0;
    let dropped = 0;
    let stalled = false;
    for (const payload of queue) {
      if (stalled) {
        kept.push(payload);
        continue;
      }
      const outcome = await send(payload);
      if (outcome === "ok") {
        sent += 1;
      } else if (outcome === "drop") {
        dropped += 1;
      } else {
        kept.push(payload);
        stalled = true;
      }
    }
    this.kv.set(JSON.stringify(kept));
    return { sent, dropped, kept: kept.length };
  }
}
