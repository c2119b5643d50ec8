"""Generate the 50-string tokenizer agreement vectors for the workbench.

The browser client re-implements the feedback tokenizer in TypeScript; this
file pins the two implementations together. Output:
frontend/test/token_vectors.json with [{text, tokens, count}].
"""

from __future__ import annotations

import json
import pathlib

from splashkit.tokens import tokenize

STRINGS = [
    "You should use races table.",
    "first_name",
    "",
    "   ",
    "one two three four five six seven eight nine ten eleven twelve thirteen fourteen fifteen",
    "replace min with max",
    "firstName",
    "lastName and first_name",
    "use the teachers table and drop last name",
    "HELLO WORLD",
    "don't use the students table",
    "price >= 10",
    "order by salary, descending!",
    "school_id",
    "camelCaseWordsSplitHere",
    "snake_case_and_camelCase mixed_Together",
    "a",
    "A",
    "1",
    "3.14 is a number",
    "semi;colons,commas.periods",
    "  leading and trailing  ",
    "tabs\tand\nnewlines",
    "use count(*) instead",
    "row #2 should be first",
    "what's the AVG здесь",
    "naïve café touché",
    "x2y3z4",
    "X2Y3Z4",
    "HTMLParser edge case",
    "ABCdef",
    "hyphen-ated words split",
    "quote \"inside\" text",
    "it's O'Brien's table",
    "underscore _leading and trailing_ ones",
    "__dunder__",
    "double  spaces   between",
    "no",
    "remove the group by clause",
    "the year column not the name column",
    "only keep the first 3 rows",
    "step 2 is wrong",
    "join circuits with races",
    "ascending order please",
    "число tokens here",
    "emoji 🙂 in feedback",
    "MiXeDcAsE",
    "ends with punctuation!!!",
    "(parenthesized words)",
    "sixteen tokens a b c d e f g h i j k l m n o",
]

assert len(STRINGS) == 50, len(STRINGS)


def main() -> None:
    out = [
        {"text": text, "tokens": tokenize(text, mode="feedback"),
         "count": len(tokenize(text, mode="feedback"))}
        for text in STRINGS
    ]
    path = pathlib.Path(__file__).resolve().parent.parent / "frontend" / "test" / "token_vectors.json"
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(out, indent=2, ensure_ascii=False) + "\n", encoding="utf-8")
    print(f"wrote {len(out)} vectors to {path}")


if __name__ == "__main__":
    main()
