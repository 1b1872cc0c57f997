// Normalization and tokenization mirroring the scoring pipeline exactly:
// vector-store keys are computed on both sides, so any divergence here
// makes exported vectors unreachable.

// Python's re \s under Unicode, spelled out so both sides collapse the
// same characters (JS \s additionally matches U+FEFF; Python's does not).
const WHITESPACE = new RegExp(
  "[\\t\\n\\x0b\\x0c\\r\\x1c-\\x1f \\x85\\xa0\\u1680\\u2000-\\u200a\\u2028\\u2029\\u202f\\u205f\\u3000]+",
  "g",
);

export const WORD_MARKER = "▁"; // ▁
const CHUNK = 4;

export function embeddingKey(label: string): string {
  return label.normalize("NFC").replace(WHITESPACE, " ").trim();
}

// Marker-prefixed chunks of at most CHUNK code points per word. Stripping
// markers and concatenating reproduces the normalized input minus spaces.
export function subwordTokens(text: string): string[] {
  const normalized = embeddingKey(text);
  if (normalized === "") {
    throw new Error("cannot tokenize an empty label");
  }
  const tokens: string[] = [];
  for (const word of normalized.split(" ")) {
    const points = Array.from(word);
    for (let start = 0; start < points.length; start += CHUNK) {
      const chunk = points.slice(start, start + CHUNK).join("");
      tokens.push(start === 0 ? WORD_MARKER + chunk : chunk);
    }
  }
  return tokens;
}
