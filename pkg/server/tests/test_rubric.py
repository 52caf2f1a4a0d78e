import pytest

from ideonaut_server import TemplateError, build_prompt, parse_reply

WELL_FORMED = "originality: 4\nrelevant: yes\nelaboration: 3\ncategory: tool"


class TestBuildPrompt:
    def test_carries_idea_and_objective(self):
        prompt = build_prompt("use the mug as a planter", "repurpose a chipped mug")
        assert "idea: use the mug as a planter" in prompt
        assert "objective: repurpose a chipped mug" in prompt

    def test_spells_out_the_template(self):
        prompt = build_prompt("x", "y")
        for label in ("originality:", "relevant:", "elaboration:", "category:"):
            assert label in prompt


class TestParseReply:
    def test_well_formed(self):
        card = parse_reply(WELL_FORMED)
        assert card == {"originality": 4, "relevant": True,
                        "elaboration": 3, "category": "tool"}

    def test_no_is_false(self):
        card = parse_reply(WELL_FORMED.replace("relevant: yes", "relevant: no"))
        assert card["relevant"] is False

    def test_tolerates_case_and_spacing(self):
        reply = "  Originality :  5\nRELEVANT: Yes\n elaboration:1\ncategory:  story time "
        card = parse_reply(reply)
        assert card["originality"] == 5
        assert card["relevant"] is True
        assert card["elaboration"] == 1
        assert card["category"] == "story time"

    def test_ignores_an_echoed_idea(self):
        # a chatty model rewriting the idea changes nothing: only the
        # four labeled lines are read
        reply = ("idea: use the mug as a BETTER planter with drainage\n"
                 + WELL_FORMED + "\nnote: I improved it")
        card = parse_reply(reply)
        assert card == {"originality": 4, "relevant": True,
                        "elaboration": 3, "category": "tool"}

    @pytest.mark.parametrize("missing", ["originality", "relevant",
                                         "elaboration", "category"])
    def test_missing_line(self, missing):
        lines = [line for line in WELL_FORMED.splitlines()
                 if not line.startswith(missing)]
        with pytest.raises(TemplateError, match=missing):
            parse_reply("\n".join(lines))

    @pytest.mark.parametrize("bad", ["0", "6", "9"])
    def test_out_of_range_score(self, bad):
        with pytest.raises(TemplateError, match="out of range"):
            parse_reply(WELL_FORMED.replace("originality: 4", f"originality: {bad}"))

    def test_non_numeric_score(self):
        with pytest.raises(TemplateError, match="not a number"):
            parse_reply(WELL_FORMED.replace("elaboration: 3", "elaboration: high"))

    def test_relevant_must_be_yes_or_no(self):
        with pytest.raises(TemplateError, match="yes or no"):
            parse_reply(WELL_FORMED.replace("relevant: yes", "relevant: maybe"))

    def test_long_category_is_clipped(self):
        reply = WELL_FORMED.replace("category: tool", "category: " + "x" * 200)
        assert len(parse_reply(reply)["category"]) == 60
