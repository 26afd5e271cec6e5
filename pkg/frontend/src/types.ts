/** Wire types mirroring the review API's response models. */

export interface SessionInfo {
  dataset: string;
  model: string;
  total: number;
  judged: number;
  pending: number;
}

export interface TripleOut {
  p: string;
  o: string;
  dt: string;
}

export type ItemKind = "FP" | "FN";

export interface ReviewItem {
  id: string;
  entity: string;
  abstract: string;
  triple: TripleOut;
  kind: ItemKind;
  fold: number | null;
  status: "pending" | "judged";
  expected: TripleOut[];
  renderings: string[];
}

export interface Category {
  code: string;
  description: string;
}

export type Polarity = "+" | "-";

export interface JudgementPayload {
  itemId: string;
  polarity: Polarity;
  category?: string;
}

export interface GoldCorrection {
  dataset: string;
  gold: string;
  removed: Array<{ entity: string; p: string; o: string; dt: string }>;
  added: Array<{ entity: string; p: string; o: string; dt: string }>;
  dropped_entities: string[];
  metrics: Record<string, unknown>;
}
