import numpy as np
import pytest

from condsweep.encoder import ConditionVector
from condsweep.errors import DimMismatch, InsufficientData, InvalidArgument, ParseError
from condsweep.rng import SeededRng
from condsweep.subspace import (
    SubspaceCoords,
    interpolate,
    pca_fit,
    project,
    read_pcam,
    reconstruct,
    sample_coords,
    write_pcam,
)


def _cv(vals, tag="t"):
    return ConditionVector(np.asarray(vals, dtype=np.float32), tag)


def _random_conds(rng, k, c):
    return [_cv(rng.normal(size=c)) for _ in range(k)]


class TestPcaFit:
    def test_gram_matches_direct_covariance(self):
        rng = np.random.default_rng(0)
        for _ in range(20):
            k = int(rng.integers(3, 21))
            c = int(rng.integers(k, 51))
            # float32 inputs: compare both routes on the same data
            x = np.stack(
                [v.values.astype(np.float64) for v in _random_conds(rng, k, c)]
            )
            model = pca_fit([_cv(row) for row in x], d=k)
            mean = x.mean(axis=0)
            xc = x - mean
            cov = xc.T @ xc / (k - 1)
            lam, vecs = np.linalg.eigh(cov)
            lam = lam[::-1]
            vecs = vecs[:, ::-1]
            d = model.modes.shape[0]
            assert np.allclose(model.mode_stds, np.sqrt(np.maximum(lam[:d], 0)), atol=1e-9)
            for j in range(d):
                direct = vecs[:, j]
                got = model.modes[j]
                assert min(
                    np.abs(got - direct).max(), np.abs(got + direct).max()
                ) <= 1e-9

    def test_orthonormality(self):
        rng = np.random.default_rng(1)
        model = pca_fit(_random_conds(rng, 15, 40), d=15)
        gram = model.modes @ model.modes.T
        assert np.abs(gram - np.eye(len(gram))).max() <= 1e-9

    def test_explained_sums_to_one_and_descends(self):
        rng = np.random.default_rng(2)
        model = pca_fit(_random_conds(rng, 10, 30), d=10)
        assert abs(model.explained.sum() - 1.0) <= 1e-9
        assert np.all(np.diff(model.explained) <= 1e-15)
        assert np.all(np.diff(model.mode_stds) <= 1e-15)

    def test_identical_vectors_rank_zero(self):
        model = pca_fit([_cv([1, 2, 3])] * 5, d=3)
        assert model.n_modes == 0

    def test_collinear_example(self):
        v = np.array([3.0, 0, 4.0, 0, 0])  # norm 5
        mu = np.array([1.0, 1, 1, 1, 1])
        conds = [_cv(mu + t * v) for t in (-1.0, 0.0, 1.0)]
        model = pca_fit(conds, d=5)
        assert model.n_modes == 1
        # sample std of t over {-1,0,1} is 1, so s_1 = ||v||
        assert np.isclose(model.mode_stds[0], 5.0, atol=1e-6)
        unit = v / 5.0
        assert min(
            np.abs(model.modes[0] - unit).max(), np.abs(model.modes[0] + unit).max()
        ) <= 1e-6

    def test_d_caps_modes(self):
        rng = np.random.default_rng(3)
        model = pca_fit(_random_conds(rng, 12, 30), d=4)
        assert model.n_modes == 4

    def test_validation(self):
        with pytest.raises(InsufficientData):
            pca_fit([_cv([1, 2])], d=1)
        with pytest.raises(DimMismatch):
            pca_fit([_cv([1, 2]), _cv([1, 2, 3])], d=1)
        with pytest.raises(InvalidArgument):
            pca_fit([_cv([1, 2]), _cv([3, 4])], d=0)
        with pytest.raises(InvalidArgument):
            pca_fit([_cv([1, 2], "a"), _cv([3, 4], "b")], d=1)


class TestProjectReconstruct:
    def _model(self, seed=0, k=10, c=25):
        rng = np.random.default_rng(seed)
        conds = _random_conds(rng, k, c)
        return pca_fit(conds, d=k), conds

    def test_project_mean_is_zero(self):
        model, _ = self._model()
        z = project(model, _cv(model.mean)).z
        assert np.abs(z).max() <= 1e-6

    def test_project_first_mode(self):
        model, _ = self._model()
        c = model.mean + model.mode_stds[0] * model.modes[0]
        z = project(model, _cv(c)).z
        want = np.zeros(model.n_modes)
        want[0] = 1.0
        assert np.abs(z - want).max() <= 1e-6

    def test_round_trip_on_training_data_at_full_rank(self):
        model, conds = self._model()
        for c in conds:
            rec = reconstruct(model, project(model, c))
            a = c.values.astype(np.float64)
            b = rec.values.astype(np.float64)
            assert np.linalg.norm(a - b) <= 1e-6 * np.linalg.norm(a)

    def test_reconstruct_zero_is_mean(self):
        model, _ = self._model()
        rec = reconstruct(model, SubspaceCoords(np.zeros(model.n_modes)))
        assert np.abs(rec.values.astype(np.float64) - model.mean.astype(np.float32)).max() <= 1e-9

    def test_reconstruct_unit_first_coord(self):
        model, _ = self._model()
        z = np.zeros(model.n_modes)
        z[0] = 1.0
        rec = reconstruct(model, SubspaceCoords(z)).values.astype(np.float64)
        want = model.mean + model.mode_stds[0] * model.modes[0]
        assert np.abs(rec - want).max() <= 1e-6

    def test_reconstruction_error_non_increasing_in_d(self):
        rng = np.random.default_rng(5)
        x = np.stack([rng.normal(size=30) for _ in range(12)])
        conds = [_cv(row) for row in x]
        errs = []
        for d in (1, 3, 6, 11):
            model = pca_fit(conds, d=d)
            err = 0.0
            for c in conds:
                rec = reconstruct(model, project(model, c)).values.astype(np.float64)
                err += np.linalg.norm(rec - c.values.astype(np.float64))
            errs.append(err)
        assert all(b <= a + 1e-9 for a, b in zip(errs, errs[1:]))

    def test_dim_checks(self):
        model, _ = self._model()
        with pytest.raises(DimMismatch):
            project(model, _cv(np.zeros(model.dim + 1)))
        with pytest.raises(DimMismatch):
            reconstruct(model, SubspaceCoords(np.zeros(model.n_modes + 1)))

    def test_encoder_tag_propagates(self):
        rng = np.random.default_rng(8)
        conds = [_cv(rng.normal(size=10), "density") for _ in range(4)]
        model = pca_fit(conds, d=3)
        assert model.encoder_id == "density"
        rec = reconstruct(model, SubspaceCoords(np.zeros(model.n_modes)))
        assert rec.encoder_id == "density"


class TestSampleCoords:
    def test_beta_zero(self):
        rng = np.random.default_rng(4)
        model = pca_fit(_random_conds(rng, 6, 12), d=6)
        z = sample_coords(model, 0.0, SeededRng(42)).z
        assert np.array_equal(z, np.zeros(model.n_modes))

    def test_deterministic(self):
        rng = np.random.default_rng(4)
        model = pca_fit(_random_conds(rng, 6, 12), d=6)
        a = sample_coords(model, 1.0, SeededRng(42)).z
        b = sample_coords(model, 1.0, SeededRng(42)).z
        assert np.array_equal(a, b)

    def test_std_concentration(self):
        rng = np.random.default_rng(4)
        model = pca_fit(_random_conds(rng, 6, 12), d=6)
        srng = SeededRng(0)
        draws = np.stack([sample_coords(model, 1.0, srng).z for _ in range(10000)])
        stds = draws.std(axis=0)
        assert np.all(np.abs(stds - 1.0) < 0.05)


class TestInterpolate:
    def test_endpoints_are_projections(self):
        rng = np.random.default_rng(6)
        conds = _random_conds(rng, 8, 20)
        model = pca_fit(conds, d=8)
        a, b = conds[0], conds[1]
        at0 = interpolate(model, a, b, 0.0).values
        proj_a = reconstruct(model, project(model, a)).values
        assert np.array_equal(at0, proj_a)
        at1 = interpolate(model, a, b, 1.0).values
        proj_b = reconstruct(model, project(model, b)).values
        assert np.array_equal(at1, proj_b)

    def test_same_endpoints_t_independent(self):
        rng = np.random.default_rng(6)
        conds = _random_conds(rng, 8, 20)
        model = pca_fit(conds, d=8)
        a = conds[2]
        r1 = interpolate(model, a, a, 0.1).values.astype(np.float64)
        r2 = interpolate(model, a, a, 0.9).values.astype(np.float64)
        assert np.abs(r1 - r2).max() <= 1e-9


class TestPcamFormat:
    def test_round_trip(self):
        rng = np.random.default_rng(9)
        model = pca_fit(_random_conds(rng, 7, 18), d=5)
        out = read_pcam(write_pcam(model))
        assert out.dim == model.dim
        assert out.n_modes == model.n_modes
        assert out.k_train == model.k_train
        assert out.encoder_id == model.encoder_id
        # payload stored as float32
        assert np.abs(out.mean - model.mean).max() <= 1e-6
        assert np.abs(out.modes - model.modes).max() <= 1e-6
        assert np.abs(out.mode_stds - model.mode_stds).max() <= 1e-6

    def test_bad_magic(self):
        with pytest.raises(ParseError):
            read_pcam(b"XXXX" + bytes(64))

    def test_truncated(self):
        rng = np.random.default_rng(9)
        model = pca_fit(_random_conds(rng, 5, 12), d=3)
        data = write_pcam(model)
        with pytest.raises(ParseError):
            read_pcam(data[:-10])
