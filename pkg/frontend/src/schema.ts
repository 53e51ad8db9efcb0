import { z } from "zod";

export const REVIEW_EXPORT_VERSION = 1;

/**
 * One blinded review item. `.strict()` makes blinding structural: an export
 * that carries any extra field (automated scores, judge verdicts, embeddings)
 * is rejected outright instead of silently shown to annotators.
 */
export const ReviewItemSchema = z
  .object({
    item_id: z.string().min(1),
    sample_id: z.string().min(1),
    prompt_id: z.string().min(1),
    generator: z.string().min(1),
    description: z.string(),
    vulnerable_block: z.string(),
    fixed_block: z.string(),
    patch_text: z.string().min(1),
    status: z.enum([
      "not_compilable",
      "compilable_untested",
      "plausible",
      "not_plausible",
    ]),
  })
  .strict();

export const ReviewExportSchema = z
  .object({
    version: z.literal(REVIEW_EXPORT_VERSION),
    items: z.array(ReviewItemSchema),
  })
  .strict();

export const LabelValueSchema = z.enum(["reasonable", "unreasonable"]);

export const LabelEntrySchema = z
  .object({
    item_id: z.string().min(1),
    annotator: z.string().min(1),
    label: LabelValueSchema,
  })
  .strict();

export const ResolutionEntrySchema = z
  .object({
    item_id: z.string().min(1),
    final_label: LabelValueSchema,
  })
  .strict();

export const LabelFileSchema = z
  .object({
    version: z.literal(REVIEW_EXPORT_VERSION),
    labels: z.array(LabelEntrySchema),
    resolutions: z.array(ResolutionEntrySchema),
  })
  .strict();

export type ReviewItem = z.infer<typeof ReviewItemSchema>;
export type ReviewExport = z.infer<typeof ReviewExportSchema>;
export type LabelValue = z.infer<typeof LabelValueSchema>;
export type LabelEntry = z.infer<typeof LabelEntrySchema>;
export type ResolutionEntry = z.infer<typeof ResolutionEntrySchema>;
export type LabelFile = z.infer<typeof LabelFileSchema>;

export function parseReviewExport(raw: unknown): ReviewExport {
  return ReviewExportSchema.parse(raw);
}

export function parseLabelFile(raw: unknown): LabelFile {
  return LabelFileSchema.parse(raw);
}
