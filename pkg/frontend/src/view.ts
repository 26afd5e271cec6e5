/** Pure render models: everything the DOM layer needs, precomputed. */

import { segments, type Segment } from "./highlight.ts";
import type { Category, ReviewItem } from "./types.ts";

export interface ReviewCard {
  id: string;
  entity: string;
  kind: "FP" | "FN";
  kindLabel: string;
  predicate: string;
  value: string;
  datatype: string;
  found: boolean;
  abstractSegments: Segment[];
  expected: Array<{ p: string; o: string; dt: string; isCandidate: boolean }>;
}

export function buildCard(item: ReviewItem): ReviewCard {
  const parts = segments(item.abstract, item.renderings);
  return {
    id: item.id,
    entity: item.entity,
    kind: item.kind,
    kindLabel:
      item.kind === "FP" ? "predicted, not expected" : "expected, not predicted",
    predicate: item.triple.p,
    value: item.triple.o,
    datatype: item.triple.dt,
    found: parts.some((s) => s.hit),
    abstractSegments: parts,
    expected: item.expected.map((t) => ({
      ...t,
      isCandidate: t.p === item.triple.p && t.o === item.triple.o,
    })),
  };
}

export function categoryHint(categories: Category[]): string {
  return categories
    .map((category, i) => `${i + 1}=${category.code}`)
    .join("  ");
}
