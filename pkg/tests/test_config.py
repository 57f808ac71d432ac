"""
Tests for model configuration documents
"""

import os
import shutil
import tempfile
import unittest

from models.types import ModelConfig
from utils.config import load_config, parse_config, serialize_config
from utils.errors import ConfigError

DOCUMENT = """
# 4x4 scenario
n = 4
m = 4
class = v
f_d_hz = 50
samples = 2000
s_ratios = 0.8, 0.6, 0.4
theta =
"""


class TestParseConfig(unittest.TestCase):
    def test_full_document(self):
        """Test that every key lands in its field"""
        cfg = parse_config(DOCUMENT)
        self.assertEqual((cfg.n, cfg.m, cfg.model_class), (4, 4, "V"))
        self.assertEqual(cfg.f_d, 50.0)
        self.assertEqual(cfg.n_sam, 2000)
        self.assertEqual(cfg.s_ratios, (0.8, 0.6, 0.4))
        self.assertIsNone(cfg.theta)

    def test_sampling_factor_defaults(self):
        """Test that S_f defaults to 8 for generation and 20 for scenarios"""
        self.assertEqual(parse_config("").s_f, 8.0)
        self.assertEqual(parse_config("", scenario=True).s_f, 20.0)
        self.assertEqual(parse_config("s_f = 12", scenario=True).s_f, 12.0)

    def test_overrides_win(self):
        """Test that keyword overrides beat the document and None is ignored"""
        cfg = parse_config("n = 2\nm = 2\nseed = 4", seed=9, n=None)
        self.assertEqual(cfg.seed, 9)
        self.assertEqual(cfg.n, 2)

    def test_unknown_key(self):
        """Test that an unknown key is named in the error"""
        with self.assertRaises(ConfigError) as ctx:
            parse_config("n = 2\nbandwidth = 5")
        self.assertEqual(ctx.exception.field, "bandwidth")

    def test_missing_value(self):
        """Test that a key without '=' is refused"""
        with self.assertRaises(ConfigError) as ctx:
            parse_config("samples")
        self.assertEqual(ctx.exception.field, "samples")

    def test_bad_numbers(self):
        """Test that malformed numbers name their key"""
        for text, field in (("n = two", "n"), ("f_d_hz = fast", "f_d_hz"), ("k_f = nan", "k_f")):
            with self.subTest(text=text):
                with self.assertRaises(ConfigError) as ctx:
                    parse_config(text)
                self.assertEqual(ctx.exception.field, field)

    def test_range_errors_come_from_the_model(self):
        """Test that range checks name the offending field"""
        with self.assertRaises(ConfigError) as ctx:
            parse_config("samples = 30")
        self.assertEqual(ctx.exception.field, "samples")

    def test_serialize_round_trip(self):
        """Test that a serialized config parses back to an equal config"""
        cfg = ModelConfig(n=4, m=2, f_d=33.3, s_f=9.5, n_sam=1234, k_f=0.7, s_ratios=(0.3,),
                          model_class="V", seed=77, theta=None)
        self.assertEqual(parse_config(serialize_config(cfg)), cfg)
        self.assertEqual(parse_config(cfg.to_text()), cfg)


class TestLoadConfig(unittest.TestCase):
    def setUp(self):
        self.tmp = tempfile.mkdtemp()

    def tearDown(self):
        shutil.rmtree(self.tmp, ignore_errors=True)

    def test_load_from_file(self):
        """Test loading a document from disk with an override"""
        path = os.path.join(self.tmp, "model.env")
        with open(path, "w", encoding="utf-8") as handle:
            handle.write(DOCUMENT)
        cfg = load_config(path, n_sam=600)
        self.assertEqual(cfg.n_sam, 600)
        self.assertEqual(cfg.n, 4)

    def test_shipped_documents_parse(self):
        """Test that the documents under config/ are valid"""
        root = os.path.join(os.path.dirname(__file__), "..", "config")
        for name in ("default.env", "stress_4x4.env"):
            with self.subTest(name=name):
                load_config(os.path.join(root, name))


if __name__ == '__main__':
    unittest.main()
