import pytest
from hypothesis import given
from hypothesis import strategies as st

from splashkit.tokens import TokenizeError, feedback_token_count, sql_lex, tokenize


class TestFeedbackMode:
    def test_whitespace_and_punctuation_split(self):
        assert tokenize("You should use races table.", mode="feedback") == [
            "you", "should", "use", "races", "table",
        ]

    def test_underscore_split(self):
        assert tokenize("first_name", mode="feedback") == ["first", "name"]

    def test_camel_case_split(self):
        assert tokenize("firstName", mode="feedback") == ["first", "name"]

    def test_empty(self):
        assert tokenize("", mode="feedback") == []

    def test_count_helper(self):
        assert feedback_token_count("replace min with max") == 4

    @given(st.text())
    def test_total_and_deterministic(self, text):
        first = tokenize(text, mode="feedback")
        assert first == tokenize(text, mode="feedback")
        assert all(isinstance(t, str) and t for t in first)

    @given(st.text())
    def test_tokens_are_lowercase(self, text):
        for token in tokenize(text, mode="feedback"):
            assert token == token.lower()


class TestSqlMode:
    def test_operator_tokenization(self):
        assert tokenize("count(*) >= 2", mode="sql") == ["count", "(", "*", ")", ">=", "2"]

    def test_keywords_lowercased(self):
        assert tokenize("SELECT Name FROM T", mode="sql") == ["select", "name", "from", "t"]

    def test_string_literal_is_one_token_case_preserved(self):
        assert tokenize("WHERE x = 'FooBar'", mode="sql") == ["where", "x", "=", "'FooBar'"]

    def test_unterminated_string_reports_position(self):
        with pytest.raises(TokenizeError) as err:
            tokenize("select 'oops", mode="sql")
        assert err.value.position == 7

    def test_lex_offsets(self):
        pairs = sql_lex("a <= 10")
        assert pairs == [("a", 0), ("<=", 2), ("10", 5)]

    def test_multi_char_operators_stay_whole(self):
        assert tokenize("a <> b != c <= d", mode="sql") == [
            "a", "<>", "b", "!=", "c", "<=", "d",
        ]


def test_unknown_mode_rejected():
    with pytest.raises(ValueError):
        tokenize("x", mode="words")
