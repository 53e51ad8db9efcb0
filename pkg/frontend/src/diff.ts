export type DiffRow = {
  left: string | null;
  right: string | null;
  kind: "same" | "removed" | "added";
};

function lcsTable(a: string[], b: string[]): number[][] {
  const table: number[][] = Array.from({ length: a.length + 1 }, () =>
    new Array<number>(b.length + 1).fill(0),
  );
  for (let i = 1; i <= a.length; i++) {
    for (let j = 1; j <= b.length; j++) {
      table[i][j] =
        a[i - 1] === b[j - 1]
          ? table[i - 1][j - 1] + 1
          : Math.max(table[i - 1][j], table[i][j - 1]);
    }
  }
  return table;
}

/**
 * Side-by-side line diff (LCS-based) of the original block against the
 * candidate patch, for the review pane.
 */
export function lineDiff(leftText: string, rightText: string): DiffRow[] {
  const a = leftText.split("\n");
  const b = rightText.split("\n");
  const table = lcsTable(a, b);
  const rows: DiffRow[] = [];
  let i = a.length;
  let j = b.length;
  while (i > 0 && j > 0) {
    if (a[i - 1] === b[j - 1]) {
      rows.push({ left: a[i - 1], right: b[j - 1], kind: "same" });
      i--;
      j--;
    } else if (table[i][j - 1] >= table[i - 1][j]) {
      // Added lines are pushed first so removals precede additions after the
      // final reverse, matching conventional diff ordering.
      rows.push({ left: null, right: b[j - 1], kind: "added" });
      j--;
    } else {
      rows.push({ left: a[i - 1], right: null, kind: "removed" });
      i--;
    }
  }
  while (i > 0) {
    rows.push({ left: a[--i], right: null, kind: "removed" });
  }
  while (j > 0) {
    rows.push({ left: null, right: b[--j], kind: "added" });
  }
  return rows.reverse();
}
