import { describe, expect, it } from "vitest";
import { detect, LANGUAGES } from "../src/langid.js";

describe("detect", () => {
  it("puts a Cyrillic-family language on top for Бахрейн, with high probability", () => {
    const scores = detect("Бахрейн", 13);
    expect(["ru", "uk", "bg"]).toContain(scores[0].language);
    expect(scores[0].probability).toBeGreaterThan(0.5);
  });

  it("separates the big Latin-script languages on short phrases", () => {
    expect(detect("the United Kingdom", 5)[0].language).toBe("en");
    expect(detect("le royaume de France", 5)[0].language).toBe("fr");
    expect(detect("das Königreich Bayern", 5)[0].language).toBe("de");
  });

  it("returns probabilities sorted descending that sum to at most 1 + 1e-6", () => {
    const scores = detect("Donaldas Trampas", LANGUAGES.length);
    for (let i = 1; i < scores.length; i++) {
      expect(scores[i].probability).toBeLessThanOrEqual(scores[i - 1].probability);
    }
    const total = scores.reduce((s, e) => s + e.probability, 0);
    expect(total).toBeLessThanOrEqual(1 + 1e-6);
    expect(total).toBeGreaterThan(0.999);
  });

  it("honours top_k", () => {
    expect(detect("München", 3)).toHaveLength(3);
    expect(detect("München", 1)).toHaveLength(1);
  });

  it("rejects text with no usable characters", () => {
    expect(() => detect("   ", 5)).toThrow(/empty/);
  });
});
