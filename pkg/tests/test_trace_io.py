"""
Tests for trace files, atomic writes, CSV export and run manifests
"""

import json
import os
import shutil
import tempfile
import unittest

import numpy as np
from numpy.testing import assert_allclose

from analysis.scenario import SirSeries, TrackingPolicy, run_tracking
from analysis.statistics import empirical_cdf, rayleigh_slope
from models.doppler import periodogram
from models.eigenmodel import assemble_trace, generate
from models.types import ModelConfig
from storage.export import export_csv, load_cdf
from storage.files import PARTIAL_SUFFIX, atomic_write
from storage.manifest import MANIFEST_NAME, RunManifest, config_to_dict, load_manifest, verify_manifest, write_manifest
from storage.trace_io import HEADER_SIZE, load_trace, read_header, read_trace, write_trace
from utils.errors import TraceFormatError


class TestTraceFiles(unittest.TestCase):
    def setUp(self):
        self.tmp = tempfile.mkdtemp()
        self.trace = generate(ModelConfig(n=4, m=2, n_sam=300, k_f=1.5, seed=17))

    def tearDown(self):
        shutil.rmtree(self.tmp, ignore_errors=True)

    def path(self, name):
        return os.path.join(self.tmp, name)

    def test_header_layout(self):
        """Test the 52-byte header and the total file size"""
        self.assertEqual(HEADER_SIZE, 52)
        written = write_trace(self.trace, self.path("t.evcm"))
        self.assertEqual(os.path.getsize(self.path("t.evcm")), written.header.file_bytes)
        self.assertEqual(written.header.values_per_sample, 16 + 2 + 4)
        header = read_header(self.path("t.evcm"))
        self.assertEqual((header.n, header.m, header.n_sam, header.model_class), (4, 2, 300, "V"))
        self.assertEqual(header.k_f, 1.5)
        self.assertEqual(header.to_dict()["magic"], "EVCM")

    def test_payload_size_for_small_eigen_trace(self):
        """Test that 100 samples of a 2x2 eigen trace take 16000 payload bytes"""
        small = generate(ModelConfig(n=2, m=2, n_sam=100, seed=1))
        written = write_trace(small, self.path("s.evcm"))
        self.assertEqual(written.header.payload_bytes, 16000)
        self.assertEqual(os.path.getsize(self.path("s.evcm")), HEADER_SIZE + 16000)

    def test_eigen_round_trip_is_bit_exact(self):
        """Test that U, S and V come back bit for bit"""
        write_trace(self.trace, self.path("t.evcm"))
        back = read_trace(self.path("t.evcm"))
        self.assertTrue(np.array_equal(back.U, self.trace.U))
        self.assertTrue(np.array_equal(back.S, self.trace.S))
        self.assertTrue(np.array_equal(back.V, self.trace.V))
        assert_allclose(back.t, self.trace.t)

    def test_both_payloads(self):
        """Test that a combined file carries the eigen trace and the assembled channel"""
        write_trace(self.trace, self.path("t.evcm"), payload="both")
        loaded = load_trace(self.path("t.evcm"))
        self.assertIsNotNone(loaded.eigen)
        self.assertTrue(np.array_equal(loaded.channel.H, assemble_trace(self.trace).H))

    def test_physical_only(self):
        """Test that a physical file has no eigen components"""
        write_trace(self.trace, self.path("h.evcm"), payload="physical")
        loaded = load_trace(self.path("h.evcm"))
        self.assertIsNone(loaded.eigen)
        self.assertEqual(loaded.channel.H.shape, (300, 4, 2))
        with self.assertRaises(TraceFormatError):
            write_trace(loaded.channel, self.path("x.evcm"), payload="eigen")

    def test_truncated_file(self):
        """Test that a length mismatch is reported"""
        write_trace(self.trace, self.path("t.evcm"))
        with open(self.path("t.evcm"), "r+b") as handle:
            handle.truncate(HEADER_SIZE + 100)
        with self.assertRaises(TraceFormatError):
            load_trace(self.path("t.evcm"))

    def test_bad_magic(self):
        """Test that a foreign file is refused"""
        with open(self.path("bad.evcm"), "wb") as handle:
            handle.write(b"NOPE" + bytes(60))
        with self.assertRaises(TraceFormatError):
            read_header(self.path("bad.evcm"))

    def test_no_partial_left_behind(self):
        """Test that a finished write leaves only the final file"""
        write_trace(self.trace, self.path("t.evcm"))
        self.assertEqual(os.listdir(self.tmp), ["t.evcm"])


class TestAtomicWrite(unittest.TestCase):
    def setUp(self):
        self.tmp = tempfile.mkdtemp()

    def tearDown(self):
        shutil.rmtree(self.tmp, ignore_errors=True)

    def test_failure_leaves_nothing(self):
        """Test that an exception inside the block leaves no final or partial file"""
        target = os.path.join(self.tmp, "out.bin")
        with self.assertRaises(RuntimeError):
            with atomic_write(target) as handle:
                handle.write(b"half")
                raise RuntimeError("interrupted")
        self.assertFalse(os.path.exists(target))
        self.assertFalse(os.path.exists(target + PARTIAL_SUFFIX))

    def test_creates_parent_directories(self):
        """Test that missing directories are created"""
        target = os.path.join(self.tmp, "a", "b", "out.txt")
        with atomic_write(target, "w") as handle:
            handle.write("ok")
        with open(target) as handle:
            self.assertEqual(handle.read(), "ok")


class TestExport(unittest.TestCase):
    def setUp(self):
        self.tmp = tempfile.mkdtemp()
        self.trace = generate(ModelConfig(n=2, m=2, n_sam=600, seed=3))

    def tearDown(self):
        shutil.rmtree(self.tmp, ignore_errors=True)

    def read_rows(self, path):
        with open(path, encoding="utf-8") as handle:
            return [line.strip().split(",") for line in handle if line.strip()]

    def test_sir_series_capped(self):
        """Test that infinite SIR is exported as the 300 dB cap"""
        path = export_csv(run_tracking(self.trace, TrackingPolicy()), os.path.join(self.tmp, "sir.csv"))
        rows = self.read_rows(path)
        self.assertEqual(rows[0], ["t_norm", "sir1_db", "sir2_db"])
        self.assertEqual(len(rows), 601)
        self.assertEqual(float(rows[1][1]), 300.0)

    def test_empty_sir_series_is_header_only(self):
        """Test that an empty series exports just the header row"""
        empty = SirSeries(t=np.zeros(0), sir_db=np.zeros((0, 2)), mode_count=2, policy={})
        rows = self.read_rows(export_csv(empty, os.path.join(self.tmp, "empty.csv")))
        self.assertEqual(rows, [["t_norm", "sir1_db", "sir2_db"]])

    def test_spectrum_columns(self):
        """Test the normalized-frequency spectrum layout"""
        cfg = self.trace.config
        spec = periodogram(self.trace.U[:, 0, 0], cfg.f_s, segments=8, f_d=cfg.f_d)
        rows = self.read_rows(export_csv(spec, os.path.join(self.tmp, "spec.csv")))
        self.assertEqual(rows[0], ["f_over_fd", "psd_db"])
        self.assertEqual(len(rows) - 1, spec.bin_freqs.size)

    def test_cdf_reload(self):
        """Test that an exported CDF reads back to the same staircase"""
        cdf = empirical_cdf(np.abs(self.trace.singular_values[:, 0]))
        back = load_cdf(export_csv(cdf, os.path.join(self.tmp, "cdf.csv")), cdf.sample_count)
        assert_allclose(back.levels_db, cdf.levels_db, rtol=1e-11)
        assert_allclose(back.prob, cdf.prob, rtol=1e-11)

    def test_cdf_reload_keeps_the_slope(self):
        """Test that the slope fit of a reloaded Rayleigh CDF matches the original"""
        rng = np.random.default_rng(8)
        cdf = empirical_cdf(np.abs(rng.standard_normal(50_000) + 1j * rng.standard_normal(50_000)))
        back = load_cdf(export_csv(cdf, os.path.join(self.tmp, "rayleigh.csv")), cdf.sample_count)
        self.assertAlmostEqual(rayleigh_slope(back), rayleigh_slope(cdf), delta=1e-9)

    def test_wrong_columns(self):
        """Test that a CSV with other columns is not taken for a CDF"""
        path = os.path.join(self.tmp, "other.csv")
        with open(path, "w") as handle:
            handle.write("a,b\n1,2\n")
        with self.assertRaises(TraceFormatError):
            load_cdf(path)


class TestManifest(unittest.TestCase):
    def setUp(self):
        self.tmp = tempfile.mkdtemp()

    def tearDown(self):
        shutil.rmtree(self.tmp, ignore_errors=True)

    def test_write_load_verify(self):
        """Test that a manifest records outputs and detects later changes"""
        output = os.path.join(self.tmp, "data.bin")
        with open(output, "wb") as handle:
            handle.write(b"12345")
        manifest = RunManifest(command="generate", config=config_to_dict(ModelConfig(n=4, m=4, s_ratios=(1, 1, 1))))
        manifest.add_output(output)
        path = write_manifest(manifest, self.tmp)
        self.assertEqual(os.path.basename(path), MANIFEST_NAME)

        loaded = load_manifest(path)
        self.assertEqual(loaded.outputs, [{"path": "data.bin", "bytes": 5}])
        self.assertEqual(loaded.config["s_ratios"], [1.0, 1.0, 1.0])
        self.assertGreaterEqual(loaded.duration_seconds, 0.0)
        self.assertEqual(verify_manifest(path), [])

        with open(output, "ab") as handle:
            handle.write(b"6")
        self.assertEqual(len(verify_manifest(path)), 1)
        os.remove(output)
        self.assertIn("missing output data.bin", verify_manifest(path))

    def test_manifest_is_json(self):
        """Test that the manifest is plain JSON with local timestamps"""
        path = write_manifest(RunManifest(command="validate", extra={"profile": "quick"}), self.tmp)
        with open(path, encoding="utf-8") as handle:
            data = json.load(handle)
        self.assertEqual(data["command"], "validate")
        self.assertIn("T", data["started_at"])
        self.assertIsNotNone(data["finished_at"])


if __name__ == '__main__':
    unittest.main()
