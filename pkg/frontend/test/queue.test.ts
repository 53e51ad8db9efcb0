import { describe, expect, it } from "vitest";

import { mulberry32, reviewQueue } from "../src/queue.js";
import type { ReviewItem } from "../src/schema.js";

function makeItem(id: string): ReviewItem {
  return {
    item_id: id,
    sample_id: id.split("/")[0],
    prompt_id: "P1",
    generator: "alpha",
    description: "d",
    vulnerable_block: "v",
    fixed_block: "f",
    patch_text: "p",
    status: "plausible",
  };
}

const items = ["s1/P1/a", "s2/P1/a", "s3/P1/a", "s4/P1/a", "s5/P1/a"].map(makeItem);

describe("mulberry32", () => {
  it("is deterministic per seed", () => {
    const a = mulberry32(7);
    const b = mulberry32(7);
    const c = mulberry32(8);
    const seqA = [a(), a(), a()];
    expect([b(), b(), b()]).toEqual(seqA);
    expect([c(), c(), c()]).not.toEqual(seqA);
  });

  it("stays in [0, 1)", () => {
    const rand = mulberry32(123);
    for (let i = 0; i < 1000; i++) {
      const x = rand();
      expect(x).toBeGreaterThanOrEqual(0);
      expect(x).toBeLessThan(1);
    }
  });
});

describe("reviewQueue", () => {
  it("is deterministic for the same annotator and seed", () => {
    const first = reviewQueue(items, "alice", 42).map((i) => i.item_id);
    const second = reviewQueue(items, "alice", 42).map((i) => i.item_id);
    expect(second).toEqual(first);
  });

  it("does not depend on the input order of the export", () => {
    const shuffledInput = [...items].reverse();
    expect(reviewQueue(shuffledInput, "alice", 42)).toEqual(
      reviewQueue(items, "alice", 42),
    );
  });

  it("gives different annotators different orders", () => {
    const alice = reviewQueue(items, "alice", 42).map((i) => i.item_id);
    const bob = reviewQueue(items, "bob", 42).map((i) => i.item_id);
    expect(alice.sort()).toEqual(bob.slice().sort());
    expect(reviewQueue(items, "alice", 42).map((i) => i.item_id)).not.toEqual(bob);
  });

  it("is a permutation of the input", () => {
    const out = reviewQueue(items, "carol", 1).map((i) => i.item_id);
    expect([...out].sort()).toEqual(items.map((i) => i.item_id).sort());
  });
});
