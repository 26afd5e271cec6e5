/** Locate the candidate value's surface forms inside the abstract.
 *
 * The server supplies the surface forms (the pipeline's rendering table),
 * so the client never re-derives what "found in the text" means.  Both
 * sides are compared after NFC normalization, exactly like the pipeline.
 */

export interface Segment {
  text: string;
  hit: boolean;
}

function nfc(text: string): string {
  return text.normalize("NFC");
}

export function findSpans(haystack: string, needles: string[]): Array<[number, number]> {
  const spans: Array<[number, number]> = [];
  for (const raw of needles) {
    const needle = nfc(raw);
    if (!needle) continue;
    let from = 0;
    while (true) {
      const at = haystack.indexOf(needle, from);
      if (at === -1) break;
      spans.push([at, at + needle.length]);
      from = at + 1;
    }
  }
  spans.sort((a, b) => a[0] - b[0] || a[1] - b[1]);
  const merged: Array<[number, number]> = [];
  for (const [start, end] of spans) {
    const last = merged[merged.length - 1];
    if (last && start <= last[1]) {
      last[1] = Math.max(last[1], end);
    } else {
      merged.push([start, end]);
    }
  }
  return merged;
}

export function segments(abstract: string, renderings: string[]): Segment[] {
  const text = nfc(abstract);
  const spans = findSpans(text, renderings);
  if (!spans.length) return [{ text, hit: false }];
  const out: Segment[] = [];
  let cursor = 0;
  for (const [start, end] of spans) {
    if (start > cursor) out.push({ text: text.slice(cursor, start), hit: false });
    out.push({ text: text.slice(start, end), hit: true });
    cursor = end;
  }
  if (cursor < text.length) out.push({ text: text.slice(cursor), hit: false });
  return out;
}

export function anyHit(abstract: string, renderings: string[]): boolean {
  return findSpans(nfc(abstract), renderings).length > 0;
}
