import { readFileSync, writeFileSync } from "node:fs";
import express from "express";
import { z } from "zod";

import { lineDiff } from "./diff.js";
import {
  DoubleLabelError,
  LabelStore,
  NoDisagreementError,
  UnknownItemError,
} from "./labels.js";
import { reviewQueue } from "./queue.js";
import { LabelValueSchema, parseReviewExport, type ReviewExport } from "./schema.js";

const LabelRequestSchema = z
  .object({
    annotator: z.string().min(1),
    label: LabelValueSchema,
  })
  .strict();

export function createApp(review: ReviewExport, labelsOut: string) {
  const store = new LabelStore(review.items.map((item) => item.item_id));
  const byId = new Map(review.items.map((item) => [item.item_id, item]));
  const app = express();
  app.use(express.json());

  app.get("/api/queue/:annotator", (req, res) => {
    const seed = Number(req.query.seed ?? 0);
    const queue = reviewQueue(review.items, req.params.annotator, seed);
    res.json(queue.map((item) => item.item_id));
  });

  app.get("/api/items/:itemId(*)", (req, res) => {
    const item = byId.get(req.params.itemId);
    if (!item) {
      res.status(404).json({ error: "unknown item" });
      return;
    }
    res.json({ ...item, diff: lineDiff(item.vulnerable_block, item.patch_text) });
  });

  app.post("/api/items/:itemId(*)/label", (req, res) => {
    const parsed = LabelRequestSchema.safeParse(req.body);
    if (!parsed.success) {
      res.status(400).json({ error: parsed.error.message });
      return;
    }
    try {
      store.addLabel(parsed.data.annotator, req.params.itemId, parsed.data.label);
    } catch (err) {
      if (err instanceof DoubleLabelError) {
        res.status(409).json({ error: err.message });
        return;
      }
      if (err instanceof UnknownItemError) {
        res.status(404).json({ error: err.message });
        return;
      }
      throw err;
    }
    writeFileSync(labelsOut, JSON.stringify(store.toLabelFile(), null, 2));
    res.json({ ok: true });
  });

  app.get("/api/disagreements", (_req, res) => {
    res.json({ items: store.disagreements(), agreement: store.agreementRate() });
  });

  app.post("/api/resolutions/:itemId(*)", (req, res) => {
    const label = LabelValueSchema.safeParse(req.body?.final_label);
    if (!label.success) {
      res.status(400).json({ error: "final_label must be reasonable|unreasonable" });
      return;
    }
    try {
      store.resolve(req.params.itemId, label.data);
    } catch (err) {
      if (err instanceof UnknownItemError) {
        res.status(404).json({ error: err.message });
        return;
      }
      if (err instanceof NoDisagreementError) {
        res.status(409).json({ error: err.message });
        return;
      }
      throw err;
    }
    writeFileSync(labelsOut, JSON.stringify(store.toLabelFile(), null, 2));
    res.json({ ok: true });
  });

  return app;
}

const entryPoint = process.argv[1] ?? "";
if (entryPoint.endsWith("server.js")) {
  const [reviewFile, labelsOut = "labels.json", port = "8080"] =
    process.argv.slice(2);
  if (!reviewFile) {
    console.error("usage: node server.js <review.json> [labels.json] [port]");
    process.exit(2);
  }
  const review = parseReviewExport(JSON.parse(readFileSync(reviewFile, "utf8")));
  createApp(review, labelsOut).listen(Number(port), () => {
    console.log(`review server on :${port} (${review.items.length} items)`);
  });
}
