import { readFileSync } from "node:fs";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";

import { describe, expect, it } from "vitest";

import { LabelStore } from "../src/labels.js";
import { reviewQueue } from "../src/queue.js";
import { parseLabelFile, parseReviewExport } from "../src/schema.js";

const here = dirname(fileURLToPath(import.meta.url));
const fixture = JSON.parse(
  readFileSync(join(here, "fixtures", "review.json"), "utf8"),
);

describe("harness export fixture", () => {
  it("parses under the strict blinded schema", () => {
    const review = parseReviewExport(fixture);
    expect(review.items.length).toBeGreaterThanOrEqual(3);
    for (const item of review.items) {
      expect(item.item_id).toBe(
        `${item.sample_id}/${item.prompt_id}/${item.generator}`,
      );
    }
  });

  it("supports the full annotate-resolve-export flow", () => {
    const review = parseReviewExport(fixture);
    const store = new LabelStore(review.items.map((i) => i.item_id));
    for (const annotator of ["alice", "bob"]) {
      for (const item of reviewQueue(review.items, annotator, 7)) {
        store.addLabel(annotator, item.item_id, "reasonable");
      }
    }
    expect(store.disagreements()).toEqual([]);
    expect(store.agreementRate()).toBe(1);
    const file = store.toLabelFile();
    expect(parseLabelFile(file)).toEqual(file);
    expect(file.labels).toHaveLength(review.items.length * 2);
  });
});
