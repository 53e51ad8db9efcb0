import { describe, expect, it } from "vitest";

import { lineDiff } from "../src/diff.js";

describe("lineDiff", () => {
  it("marks identical text as all same", () => {
    const rows = lineDiff("a\nb", "a\nb");
    expect(rows.map((r) => r.kind)).toEqual(["same", "same"]);
  });

  it("pairs removals and additions around a changed line", () => {
    const rows = lineDiff("keep\nold line\nkeep2", "keep\nnew line\nkeep2");
    expect(rows.map((r) => r.kind)).toEqual(["same", "removed", "added", "same"]);
    expect(rows[1].left).toBe("old line");
    expect(rows[2].right).toBe("new line");
  });

  it("handles pure insertions and deletions", () => {
    expect(lineDiff("", "x").map((r) => r.kind)).toContain("added");
    expect(lineDiff("x\ny", "x").map((r) => r.kind)).toEqual(["same", "removed"]);
  });

  it("reconstructs both sides from the rows", () => {
    const left = "a\nb\nc\nd";
    const right = "a\nc\nd\ne";
    const rows = lineDiff(left, right);
    const leftBack = rows.filter((r) => r.left !== null).map((r) => r.left);
    const rightBack = rows.filter((r) => r.right !== null).map((r) => r.right);
    expect(leftBack.join("\n")).toBe(left);
    expect(rightBack.join("\n")).toBe(right);
  });
});
