import type { ReviewItem } from "./schema.js";

/** mulberry32: tiny deterministic PRNG, good enough for shuffling queues. */
export function mulberry32(seed: number): () => number {
  let state = seed >>> 0;
  return () => {
    state = (state + 0x6d2b79f5) >>> 0;
    let t = state;
    t = Math.imul(t ^ (t >>> 15), t | 1);
    t ^= t + Math.imul(t ^ (t >>> 7), t | 61);
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
  };
}

/** FNV-1a hash so each annotator gets their own stable sub-seed. */
export function hashString(text: string): number {
  let hash = 0x811c9dc5;
  for (let i = 0; i < text.length; i++) {
    hash ^= text.charCodeAt(i);
    hash = Math.imul(hash, 0x01000193);
  }
  return hash >>> 0;
}

/**
 * Deterministic per-annotator review order: the same (items, annotator, seed)
 * always yields the same queue, and different annotators see different orders
 * so positional bias is not shared. Items are keyed by item_id first so the
 * input order of the export file does not matter.
 */
export function reviewQueue(
  items: readonly ReviewItem[],
  annotator: string,
  seed: number,
): ReviewItem[] {
  const ordered = [...items].sort((a, b) =>
    a.item_id < b.item_id ? -1 : a.item_id > b.item_id ? 1 : 0,
  );
  const rand = mulberry32((seed ^ hashString(annotator)) >>> 0);
  for (let i = ordered.length - 1; i > 0; i--) {
    const j = Math.floor(rand() * (i + 1));
    [ordered[i], ordered[j]] = [ordered[j], ordered[i]];
  }
  return ordered;
}
