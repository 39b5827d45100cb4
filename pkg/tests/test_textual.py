from hypothesis import given, settings
from hypothesis import strategies as st

from recode.lexicon import normalize_text
from recode.textual import analyze_text, extract_mentions, extract_prompt_text, polarity


class TestExtractMentions:
    def test_quoted_literal_with_type_and_position(self, lexicons):
        mentions = extract_mentions(
            "Click on the 'telephone' button at the top-right corner and confirm",
            lexicons,
        )
        assert len(mentions) == 1
        m = mentions[0]
        assert m.text_literal == "telephone"
        assert m.type_name == "Button"
        assert m.position == "top-right"

    def test_two_mentions_with_color(self, lexicons):
        mentions = extract_mentions(
            "the widget on the left of the green 'confirm' button", lexicons
        )
        assert len(mentions) == 2
        positional, named = mentions
        assert positional.position == "left"
        assert named.color == "green"
        assert named.text_literal == "confirm"
        assert named.type_name == "Button"

    def test_no_anchors(self, lexicons):
        assert extract_mentions("everything is fine", lexicons) == []

    def test_capitalized_token_adjacent_to_type_word(self, lexicons):
        mentions = extract_mentions("the Submit button is gone", lexicons)
        assert len(mentions) == 1
        assert mentions[0].text_literal == "submit"
        assert mentions[0].type_name == "Button"

    def test_every_mention_has_a_feature(self, lexicons):
        texts = [
            "Click on the 'telephone' button at the top-right corner",
            "the widget on the left of the green 'confirm' button",
            "the 'OK' label next to a red icon at the bottom",
            "tap 'Start', then the top-left image",
        ]
        for text in texts:
            for mention in extract_mentions(text, lexicons):
                assert mention.feature_count() >= 1

    def test_attachment_respects_clause_boundary(self, lexicons):
        mentions = extract_mentions("the 'Save' button broke, green everywhere", lexicons)
        assert len(mentions) == 1
        assert mentions[0].color is None

    def test_quotes_in_curly_style(self, lexicons):
        mentions = extract_mentions("tap the ‘Send’ button", lexicons)
        assert mentions[0].text_literal == "send"


class TestPolarity:
    def test_negative_sentence(self, lexicons):
        assert polarity("I cannot manually refresh the contents", lexicons) == "negative"

    def test_positive_sentence(self, lexicons):
        assert polarity("the button works", lexicons) == "positive"

    def test_double_negative_cancels(self, lexicons):
        assert polarity("it is not impossible to click", lexicons) == "positive"

    def test_two_separate_negatives_stay_negative(self, lexicons):
        assert polarity("it cannot load and the icon disappears", lexicons) == "negative"

    @settings(max_examples=40, deadline=None)
    @given(
        spacing=st.integers(min_value=1, max_value=4),
        upper=st.booleans(),
    )
    def test_invariant_under_case_and_whitespace(self, lexicons, spacing, upper):
        text = "I  cannot   refresh the contents"
        mangled = text.replace(" ", " " * spacing)
        if upper:
            mangled = mangled.upper()
        assert polarity(mangled, lexicons) == polarity(text, lexicons)


class TestExtractPromptText:
    def test_quoted_prompt(self, lexicons):
        assert (
            extract_prompt_text("The app indicates the 'SQL ERROR'.", lexicons)
            == "sql error"
        )

    def test_no_prompt_word(self, lexicons):
        assert extract_prompt_text("the app crashed suddenly", lexicons) is None

    def test_clause_remainder(self, lexicons):
        assert (
            extract_prompt_text("a dialog shows connection failed, then closes", lexicons)
            == "connection failed"
        )

    def test_prompt_word_at_end_yields_nothing(self, lexicons):
        assert extract_prompt_text("only a black screen is shown", lexicons) is None

    def test_result_is_substring_of_normalized_input(self, lexicons):
        for text in (
            "The app indicates the 'SQL ERROR'.",
            "a dialog shows connection failed, then closes",
            "it says   PERMISSION  DENIED now",
        ):
            prompt = extract_prompt_text(text, lexicons)
            assert prompt is not None
            assert prompt in normalize_text(text)


class TestAnalyzeText:
    def test_bundles_everything(self, lexicons):
        analysis = analyze_text(
            "The app indicates the 'SQL ERROR' and the 'Save' button does not work.",
            lexicons,
        )
        assert analysis.prompt_text == "sql error"
        assert analysis.polarity == "negative"
        assert any(m.text_literal == "save" for m in analysis.mentions)
