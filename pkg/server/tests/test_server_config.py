import json

import pytest

from ideonaut_server import ServerConfig, ServerConfigError, load_server_config

MINIMAL = {
    "encoder_model_id": "enc",
    "decoder_model_id": "dec",
    "judge_model_id": "judge",
}


def write_config(tmp_path, doc):
    path = tmp_path / "server.json"
    path.write_text(json.dumps(doc), encoding="utf-8")
    return path


class TestServerConfig:
    def test_defaults(self):
        cfg = ServerConfig(**MINIMAL)
        assert cfg.placeholder_token == "[X]"
        assert cfg.device == "cpu"
        assert cfg.max_tokens_cap == 256
        assert cfg.judge_mode == "choice"
        assert cfg.temperature == 0.0

    @pytest.mark.parametrize("field", sorted(MINIMAL))
    def test_model_ids_must_be_non_empty(self, field):
        with pytest.raises(ServerConfigError, match=field):
            ServerConfig(**{**MINIMAL, field: "  "})

    @pytest.mark.parametrize("cap", [0, -3, 2.5, True, "64"])
    def test_bad_max_tokens_cap(self, cap):
        with pytest.raises(ServerConfigError, match="max_tokens_cap"):
            ServerConfig(**MINIMAL, max_tokens_cap=cap)

    def test_bad_judge_mode(self):
        with pytest.raises(ServerConfigError, match="judge_mode"):
            ServerConfig(**MINIMAL, judge_mode="oracle")

    @pytest.mark.parametrize("temperature", [-0.1, True, "hot"])
    def test_bad_temperature(self, temperature):
        with pytest.raises(ServerConfigError, match="temperature"):
            ServerConfig(**MINIMAL, temperature=temperature)

    def test_blank_placeholder(self):
        with pytest.raises(ServerConfigError, match="placeholder_token"):
            ServerConfig(**MINIMAL, placeholder_token="")


class TestLoadServerConfig:
    def test_round_trip(self, tmp_path):
        path = write_config(tmp_path, {**MINIMAL, "max_tokens_cap": 64})
        cfg = load_server_config(path)
        assert cfg.encoder_model_id == "enc"
        assert cfg.max_tokens_cap == 64

    def test_unknown_key_is_fatal(self, tmp_path):
        path = write_config(tmp_path, {**MINIMAL, "judge_modes": "choice"})
        with pytest.raises(ServerConfigError, match="judge_modes"):
            load_server_config(path)

    def test_missing_model_id(self, tmp_path):
        doc = dict(MINIMAL)
        del doc["judge_model_id"]
        path = write_config(tmp_path, doc)
        with pytest.raises(ServerConfigError, match="judge_model_id"):
            load_server_config(path)

    def test_missing_file(self, tmp_path):
        with pytest.raises(ServerConfigError, match="not found"):
            load_server_config(tmp_path / "absent.json")

    def test_non_object_document(self, tmp_path):
        path = tmp_path / "server.json"
        path.write_text("[1, 2]", encoding="utf-8")
        with pytest.raises(ServerConfigError, match="JSON object"):
            load_server_config(path)

    def test_invalid_json(self, tmp_path):
        path = tmp_path / "server.json"
        path.write_text("{nope", encoding="utf-8")
        with pytest.raises(ServerConfigError, match="not valid JSON"):
            load_server_config(path)

    def test_local_model_paths_resolve_against_config_dir(self, tmp_path):
        (tmp_path / "models" / "enc").mkdir(parents=True)
        doc = {**MINIMAL, "encoder_model_id": "models/enc"}
        path = write_config(tmp_path, doc)
        cfg = load_server_config(path)
        assert cfg.encoder_model_id == str(tmp_path / "models" / "enc")
        # hub-style ids that match nothing on disk pass through unchanged
        assert cfg.decoder_model_id == "dec"
