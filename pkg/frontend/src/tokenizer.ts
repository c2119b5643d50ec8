/**
 * Feedback tokenizer, mirroring the server's rules exactly:
 * lowercase, strip punctuation (ASCII words only), split on underscores
 * and camelCase boundaries. The server stays authoritative: this counter
 * only drives the live UI; the 15-token cap is re-checked server-side.
 *
 * Agreement with the server is pinned by test/token_vectors.json.
 */

const WORD = /[A-Za-z0-9_]+/g;
const CAMEL_BOUNDARY = /(?<=[a-z0-9])(?=[A-Z])/;

export const MAX_FEEDBACK_TOKENS = 15;

export function tokenizeFeedback(text: string): string[] {
  const tokens: string[] = [];
  for (const word of text.match(WORD) ?? []) {
    for (const piece of word.split("_")) {
      for (const sub of piece.split(CAMEL_BOUNDARY)) {
        if (sub) tokens.push(sub.toLowerCase());
      }
    }
  }
  return tokens;
}

export function feedbackTokenCount(text: string): number {
  return tokenizeFeedback(text).length;
}
