import json
import os
import tempfile

import numpy as np
from django.test import SimpleTestCase

from fiducials.analytic import D4Params, fiducial_d2, fiducial_d4
from fiducials.exceptions import FiducialFileError, RejectedBasisError
from fiducials.files import (
    WH_BASIS, dump_fiducial_file, fiducial_file_for, load_fiducial_file, parse_json,
    read_fiducial_file, write_fiducial_file,
)
from fiducials.serializers import ComplexArrayField, SearchResultSerializer
from fiducials.search import SearchConfig, minimize
from fiducials.wh_group import ErrorBasis, build_wh_basis, haar_random_fiducial
from rest_framework import serializers


def payload_for(fiducial, **changes):
    payload = json.loads(dump_fiducial_file(fiducial_file_for(fiducial, method='analytic')))
    payload.update(changes)
    return payload


class FiducialFileTests(SimpleTestCase):
    def test_write_and_read_are_exact(self):
        rng = np.random.default_rng(12)
        for fiducial in (fiducial_d4(D4Params(k=1, m=1)), haar_random_fiducial(7, rng)):
            with tempfile.TemporaryDirectory() as directory:
                path = os.path.join(directory, 'fiducial.json')
                write_fiducial_file(fiducial_file_for(fiducial, method='search', seed=4), path)
                loaded = read_fiducial_file(path)
            np.testing.assert_array_equal(loaded.amplitudes, fiducial.amplitudes)
            self.assertEqual(loaded.basis, WH_BASIS)
            self.assertEqual(loaded.provenance.method, 'search')
            self.assertEqual(loaded.provenance.seed, 4)
            self.assertIsNotNone(loaded.provenance.timestamp)

    def test_provenance_records_the_certificate(self):
        fiducial_file = fiducial_file_for(fiducial_d2(0), method='analytic')
        self.assertLess(fiducial_file.provenance.sic_deviation, 1e-14)
        self.assertAlmostEqual(fiducial_file.provenance.objective, 4 / 3, places=12)
        self.assertIsNone(fiducial_file.provenance.seed)

    def test_small_norm_drift_is_renormalized(self):
        payload = payload_for(fiducial_d2(0))
        payload['amplitudes'] = [[(1 + 1e-10) * x for x in pair] for pair in payload['amplitudes']]
        with self.assertLogs('fiducials.files', 'WARNING'):
            loaded = load_fiducial_file(json.dumps(payload))
        self.assertAlmostEqual(float(np.linalg.norm(loaded.amplitudes)), 1.0, places=15)
        self.assertEqual(loaded.fiducial.d, 2)

    def test_large_norm_drift_is_rejected(self):
        payload = payload_for(fiducial_d2(0))
        payload['amplitudes'] = [[(1 + 1e-6) * x for x in pair] for pair in payload['amplitudes']]
        with self.assertRaises(FiducialFileError) as caught:
            load_fiducial_file(json.dumps(payload))
        self.assertIn('norm_error', caught.exception.details)

    def test_malformed_files(self):
        cases = [
            b'not json',
            b'[1, 2]',
            json.dumps(payload_for(fiducial_d2(0), format_version=2)),
            json.dumps(payload_for(fiducial_d2(0), d=3)),
            json.dumps(payload_for(fiducial_d2(0), basis='clifford')),
            json.dumps(payload_for(fiducial_d2(0), amplitudes=[[1.0, 0.0], [0.0]])),
        ]
        for source in cases:
            with self.assertRaises(FiducialFileError, msg=str(source)[:60]):
                load_fiducial_file(source)

    def test_missing_file(self):
        with self.assertRaises(FiducialFileError):
            read_fiducial_file('/nonexistent/fiducial.json')

    def test_inline_basis(self):
        basis = build_wh_basis(2)
        fiducial_file = fiducial_file_for(fiducial_d2(1), basis, method='analytic')
        loaded = load_fiducial_file(dump_fiducial_file(fiducial_file))
        self.assertIsInstance(loaded.basis, ErrorBasis)
        np.testing.assert_array_equal(loaded.resolve_basis().ops, basis.ops)

    def test_inline_basis_is_validated(self):
        basis = build_wh_basis(2)
        ops = basis.ops.copy()
        ops[2] = 3 * ops[2]
        broken = ErrorBasis(d=2, ops=ops, labels=basis.labels)
        payload = json.loads(dump_fiducial_file(fiducial_file_for(fiducial_d2(0), basis, method='analytic')))
        payload['basis']['ops'] = ComplexArrayField(ndim=3).to_representation(broken.ops)
        with self.assertRaises(RejectedBasisError):
            load_fiducial_file(json.dumps(payload))

    def test_parse_json_accepts_text_and_streams(self):
        self.assertEqual(parse_json('{"a": 1}'), {"a": 1})
        with tempfile.TemporaryFile() as handle:
            handle.write(b'{"b": 2}')
            handle.seek(0)
            self.assertEqual(parse_json(handle), {"b": 2})


class ComplexArrayFieldTests(SimpleTestCase):
    def test_rejects_bad_arrays(self):
        field = ComplexArrayField(ndim=1)
        for data in ([[1.0, 0.0], [0.5]], [1.0, 2.0], [[float('nan'), 0.0]], "abc"):
            with self.assertRaises(serializers.ValidationError, msg=repr(data)):
                field.to_internal_value(data)

    def test_keeps_every_bit(self):
        values = np.array([0.1 + 0.2j, -1 / 3 + 1e-300j, np.pi - 0.0j])
        field = ComplexArrayField(ndim=1)
        restored = field.to_internal_value(json.loads(json.dumps(field.to_representation(values))))
        np.testing.assert_array_equal(restored, values)


class SearchResultSerializerTests(SimpleTestCase):
    def test_fields(self):
        result = minimize(SearchConfig(d=2), start=fiducial_d2(0), restart_index=3, seed=17)
        data = SearchResultSerializer(result).data
        self.assertEqual(data['restart'], 3)
        self.assertEqual(data['seed'], 17)
        self.assertEqual(data['d'], 2)
        self.assertTrue(data['converged'])
        self.assertEqual(len(data['amplitudes']), 2)
        self.assertEqual(data['status'], 'gradient')
        self.assertEqual(data['polish_evaluations'], result.polish_evaluations)
