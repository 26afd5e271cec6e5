/** Thin fetch client for the review API.
 *
 * Transport failures throw NetworkError (callers may queue and retry);
 * application-level rejections (409 conflict, 422 validation) come back as
 * a JudgeResult so the caller can branch without try/catch pyramids.
 */

import type {
  Category,
  GoldCorrection,
  Polarity,
  ReviewItem,
  SessionInfo,
} from "./types.ts";

export class NetworkError extends Error {}

export class ApiError extends Error {
  constructor(public status: number, message: string) {
    super(message);
  }
}

export interface JudgeResult {
  ok: boolean;
  status: number;
  message: string;
}

export interface ReviewApi {
  session(): Promise<SessionInfo>;
  categories(): Promise<Category[]>;
  items(status: string, limit: number): Promise<ReviewItem[]>;
  judge(id: string, polarity: Polarity, category?: string): Promise<JudgeResult>;
  revoke(id: string): Promise<JudgeResult>;
  exportGold(): Promise<{ ok: boolean; status: number; body: GoldCorrection | null }>;
  renderings(value: string, datatype: string): Promise<string[]>;
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

async function detail(response: Response): Promise<string> {
  try {
    const body = await response.json();
    if (body && typeof body.detail === "string") return body.detail;
    return JSON.stringify(body);
  } catch {
    return response.statusText;
  }
}

export class ApiClient implements ReviewApi {
  constructor(
    private base = "",
    private fetchFn: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private async request(path: string, init?: RequestInit): Promise<Response> {
    let response: Response;
    try {
      response = await this.fetchFn(this.base + path, init);
    } catch (err) {
      throw new NetworkError(String(err));
    }
    return response;
  }

  private async getJson<T>(path: string): Promise<T> {
    const response = await this.request(path);
    if (!response.ok) throw new ApiError(response.status, await detail(response));
    return (await response.json()) as T;
  }

  private post(path: string, payload?: unknown): Promise<Response> {
    return this.request(path, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: payload === undefined ? null : JSON.stringify(payload),
    });
  }

  session(): Promise<SessionInfo> {
    return this.getJson("/api/session");
  }

  categories(): Promise<Category[]> {
    return this.getJson("/api/categories");
  }

  items(status = "pending", limit = 500): Promise<ReviewItem[]> {
    return this.getJson(`/api/items?status=${status}&limit=${limit}`);
  }

  async judge(id: string, polarity: Polarity, category?: string): Promise<JudgeResult> {
    const response = await this.post(`/api/items/${id}/judgement`, {
      polarity,
      ...(category ? { category } : {}),
    });
    return {
      ok: response.ok,
      status: response.status,
      message: response.ok ? "" : await detail(response),
    };
  }

  async revoke(id: string): Promise<JudgeResult> {
    const response = await this.post(`/api/items/${id}/revoke`);
    return {
      ok: response.ok,
      status: response.status,
      message: response.ok ? "" : await detail(response),
    };
  }

  async exportGold(): Promise<{ ok: boolean; status: number; body: GoldCorrection | null }> {
    const response = await this.post("/api/export/gold");
    if (!response.ok) return { ok: false, status: response.status, body: null };
    return { ok: true, status: response.status, body: (await response.json()) as GoldCorrection };
  }

  async renderings(value: string, datatype: string): Promise<string[]> {
    const response = await this.post("/api/render", { o: value, dt: datatype });
    if (!response.ok) throw new ApiError(response.status, await detail(response));
    const body = (await response.json()) as { renderings: string[] };
    return body.renderings;
  }
}
