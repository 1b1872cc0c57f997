import express from "express";
import { z } from "zod";
import {
  Backend,
  BACKEND_ID,
  backendFromEnv,
  ModelUnavailableError,
  UnknownModelError,
} from "./backend.js";
import { detect, LANGUAGES } from "./langid.js";
import { embeddingKey } from "./text.js";

const EmbedRequest = z.object({
  texts: z.array(z.string()).min(1),
  granularity: z.enum(["sentence", "subwords"]),
  model: z.string().min(1),
  // Accepted for forward compatibility with layered models; the hashed
  // backend has no layers and ignores it.
  layer: z.number().int().optional(),
});

const LangidRequest = z.object({
  texts: z.array(z.string()).min(1),
  top_k: z.number().int().min(1).optional(),
});

export interface AppOptions {
  backend?: Backend;
  batchCap?: number;
}

export function createApp(options: AppOptions = {}) {
  const backend = options.backend ?? backendFromEnv();
  const batchCap = options.batchCap ?? Number(process.env.SIDECAR_BATCH_CAP ?? 256);
  const app = express();
  app.use(express.json({ limit: "10mb" }));

  app.get("/healthz", (_req, res) => {
    res.json({
      ok: true,
      backend: BACKEND_ID,
      batch_cap: batchCap,
      models: backend.specs(),
      languages: LANGUAGES,
    });
  });

  app.post("/embed", (req, res) => {
    const parsed = EmbedRequest.safeParse(req.body);
    if (!parsed.success) {
      return res.status(400).json({ error: parsed.error.issues[0].message });
    }
    const { texts, granularity, model } = parsed.data;
    if (texts.length > batchCap) {
      return res.status(413).json({ error: `batch of ${texts.length} exceeds cap ${batchCap}` });
    }
    if (texts.some((t) => embeddingKey(t) === "")) {
      return res.status(400).json({ error: "texts must be nonempty" });
    }
    let spec;
    try {
      spec = backend.resolve(model, granularity);
    } catch (err) {
      if (err instanceof UnknownModelError) {
        return res.status(400).json({ error: err.message });
      }
      if (err instanceof ModelUnavailableError) {
        return res.status(503).json({ error: err.message });
      }
      throw err;
    }
    const results = texts.map((text) => {
      if (granularity === "sentence") {
        return { model: spec.tag, dim: spec.dim, vector: Array.from(backend.sentenceVector(spec, text)) };
      }
      const { tokens, vectors } = backend.subwordVectors(spec, text);
      return { model: spec.tag, dim: spec.dim, tokens, vectors: vectors.map((v) => Array.from(v)) };
    });
    res.json({ results, backend: BACKEND_ID });
  });

  app.post("/langid", (req, res) => {
    const parsed = LangidRequest.safeParse(req.body);
    if (!parsed.success) {
      return res.status(400).json({ error: parsed.error.issues[0].message });
    }
    const { texts, top_k } = parsed.data;
    if (texts.length > batchCap) {
      return res.status(413).json({ error: `batch of ${texts.length} exceeds cap ${batchCap}` });
    }
    if (texts.some((t) => embeddingKey(t) === "")) {
      return res.status(400).json({ error: "texts must be nonempty" });
    }
    res.json({ results: texts.map((text) => detect(text, top_k ?? 5)) });
  });

  return app;
}
