import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tandemq.field_data import (
    CenterRecord,
    ClusterFrame,
    DataError,
    ObservationSet,
    ReferentialError,
    ServiceObservation,
    Stage,
    cluster_share,
    estimate_arrival_rate,
    estimate_service_rate,
    inclusion_probability,
    load_clusters,
    load_observations,
    write_observations,
)

CENTERS_HEADER = "center_id,daily_arrivals,servers_stage1,servers_stage2\n"
OBS_HEADER = "center_id,stage,duration_minutes\n"


def write(tmp_path, name, text):
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return path


class TestLoading:
    def test_reference_fixture(self, fixture_dir):
        data = load_observations(fixture_dir / "centers.csv", fixture_dir / "observations.csv")
        assert len(data.centers) == 6
        assert sum(c.daily_arrivals for c in data.centers) / 6 == 536
        assert max(c.daily_arrivals for c in data.centers) == 722
        assert data.workday_minutes == 480

    def test_empty_centers_file(self, tmp_path):
        data = load_observations(write(tmp_path, "c.csv", ""))
        assert data.centers == () and data.observations == ()
        data = load_observations(write(tmp_path, "c2.csv", CENTERS_HEADER))
        assert data.centers == ()

    def test_unknown_center(self, tmp_path):
        centers = write(tmp_path, "c.csv", CENTERS_HEADER + "A,10,1,1\n")
        obs = write(tmp_path, "o.csv", OBS_HEADER + "A,1,2.0\nB,2,3.0\n")
        with pytest.raises(ReferentialError) as exc:
            load_observations(centers, obs)
        assert exc.value.line == 3

    @pytest.mark.parametrize(
        "row, line",
        [
            ("A,1,0\n", 2),
            ("A,1,-2\n", 2),
            ("A,3,1.0\n", 2),
            ("A,1,\n", 2),
            ("A,1,abc\n", 2),
            ("A,1\n", 2),
        ],
    )
    def test_bad_observation_rows(self, tmp_path, row, line):
        centers = write(tmp_path, "c.csv", CENTERS_HEADER + "A,10,1,1\n")
        obs = write(tmp_path, "o.csv", OBS_HEADER + row)
        with pytest.raises(DataError) as exc:
            load_observations(centers, obs)
        assert exc.value.line == line
        assert f":{line}:" in str(exc.value)

    @pytest.mark.parametrize("row", ["A,,1,1\n", "A,-1,1,1\n", "A,10,0,1\n", ",10,1,1\n", "A,ten,1,1\n"])
    def test_bad_center_rows(self, tmp_path, row):
        centers = write(tmp_path, "c.csv", CENTERS_HEADER + "B,5,1,1\n" + row)
        with pytest.raises(DataError) as exc:
            load_observations(centers)
        assert exc.value.line == 3

    def test_wrong_header(self, tmp_path):
        with pytest.raises(DataError):
            load_observations(write(tmp_path, "c.csv", "id,arrivals\n"))

    def test_duplicate_center(self, tmp_path):
        with pytest.raises(DataError):
            load_observations(write(tmp_path, "c.csv", CENTERS_HEADER + "A,1,1,1\nA,2,1,1\n"))


class TestEstimation:
    def test_reference_rates(self, fixture_dir):
        data = load_observations(fixture_dir / "centers.csv", fixture_dir / "observations.csv")
        assert estimate_arrival_rate(data) == pytest.approx(536 / 480, rel=1e-15)
        assert round(estimate_arrival_rate(data), 3) == 1.117
        assert estimate_service_rate(data, Stage.ONE) == pytest.approx(0.409, rel=1e-12)
        assert estimate_service_rate(data, 2) == pytest.approx(0.244, rel=1e-12)

    def test_single_busy_center(self):
        data = ObservationSet([CenterRecord("Roum", 722, 7, 6)])
        assert estimate_arrival_rate(data) == pytest.approx(1.504, abs=5e-4)

    def test_idle_center(self):
        assert estimate_arrival_rate(ObservationSet([CenterRecord("X", 0, 1, 1)])) == 0.0

    def test_empty_set(self):
        with pytest.raises(DataError):
            estimate_arrival_rate(ObservationSet())

    def test_service_rate_from_mean(self):
        c = CenterRecord("A", 10, 1, 1)
        obs = [ServiceObservation("A", 1, d) for d in (2.0, 2.89, 2.445)]
        data = ObservationSet([c], obs)
        assert estimate_service_rate(data, 1) == pytest.approx(1 / 2.445, rel=1e-12)
        assert round(estimate_service_rate(data, 1), 3) == 0.409

    def test_constant_service(self):
        c = CenterRecord("A", 10, 1, 1)
        data = ObservationSet([c], [ServiceObservation("A", 2, 3.5)] * 4)
        assert estimate_service_rate(data, 2) == pytest.approx(1 / 3.5)

    def test_empty_stage(self):
        c = CenterRecord("A", 10, 1, 1)
        data = ObservationSet([c], [ServiceObservation("A", 1, 3.5)])
        with pytest.raises(DataError):
            estimate_service_rate(data, 2)

    def test_scaling(self):
        base = ObservationSet([CenterRecord("A", 100, 1, 1), CenterRecord("B", 300, 1, 1)], workday_minutes=400)
        double = ObservationSet([CenterRecord("A", 200, 1, 1), CenterRecord("B", 600, 1, 1)], workday_minutes=400)
        longer = ObservationSet(base.centers, workday_minutes=800)
        assert estimate_arrival_rate(double) == pytest.approx(2 * estimate_arrival_rate(base))
        assert estimate_arrival_rate(longer) == pytest.approx(estimate_arrival_rate(base) / 2)


centers_strategy = st.lists(
    st.builds(
        CenterRecord,
        st.text("abcdefghij_-", min_size=1, max_size=8),
        st.integers(0, 5000),
        st.integers(1, 20),
        st.integers(1, 20),
    ),
    max_size=6,
    unique_by=lambda c: c.center_id,
)


@settings(max_examples=50, deadline=None)
@given(centers_strategy, st.data())
def test_round_trip(tmp_path_factory, centers, data):
    observations = []
    if centers:
        observations = data.draw(
            st.lists(
                st.builds(
                    ServiceObservation,
                    st.sampled_from([c.center_id for c in centers]),
                    st.sampled_from([1, 2]),
                    st.floats(1e-6, 1e4, allow_nan=False),
                ),
                max_size=20,
            )
        )
    original = ObservationSet(centers, observations)
    tmp = tmp_path_factory.mktemp("rt")
    write_observations(original, tmp / "c.csv", tmp / "o.csv")
    assert load_observations(tmp / "c.csv", tmp / "o.csv") == original


class TestClusters:
    def frame(self, k=8):
        return ClusterFrame((("Beirut", 339_408), ("Mount Lebanon", 215_914), ("Rest", 961_939 - 339_408 - 215_914)), k=min(k, 3))

    def test_shares(self):
        f = self.frame()
        assert round(cluster_share(f, 0), 3) == 0.353
        assert round(cluster_share(f, 1), 3) == 0.224
        assert sum(cluster_share(f, j) for j in range(3)) == pytest.approx(1.0, abs=1e-12)

    def test_fixture_clusters(self, fixture_dir):
        f = load_clusters(fixture_dir / "clusters.csv", 8)
        assert len(f.clusters) == 8
        assert sum(size for _, size in f.clusters) == 961_939
        assert round(cluster_share(f, 0), 3) == 0.353
        assert inclusion_probability(f, 0) == pytest.approx(1 - (1 - 339_408 / 961_939) ** 8, rel=1e-14)

    def test_inclusion_probability_on_rounded_share(self):
        f = ClusterFrame((("a", 353), ("b", 647)), k=2)
        # k=8 requires 8 clusters: pad with empty ones
        f8 = ClusterFrame((("a", 353), ("b", 647)) + tuple((f"z{i}", 0) for i in range(6)), k=8)
        assert inclusion_probability(f8, 0) == pytest.approx(0.9693, abs=5e-5)
        assert inclusion_probability(f, 0) == pytest.approx(1 - 0.647**2)

    def test_empty_cluster(self):
        f = ClusterFrame((("a", 0), ("b", 10)), k=2)
        assert inclusion_probability(f, 0) == 0.0

    def test_single_draw_equals_share(self):
        f = ClusterFrame((("a", 3), ("b", 7), ("c", 5)), k=1)
        for j in range(3):
            assert inclusion_probability(f, j) == pytest.approx(cluster_share(f, j), rel=1e-15)

    def test_single_cluster(self):
        assert cluster_share(ClusterFrame((("only", 42),), k=1), 0) == 1.0

    def test_monotone_in_size_and_draws(self):
        sizes = [10, 50, 100, 400]
        probs = [inclusion_probability(ClusterFrame((("x", n), ("y", 500), ("z", 500)), k=2), 0) for n in sizes]
        assert all(b > a for a, b in zip(probs, probs[1:]))
        frames = [ClusterFrame(tuple((str(i), 10 + i) for i in range(8)), k=k) for k in range(1, 9)]
        probs = [inclusion_probability(f, 3) for f in frames]
        assert all(b > a for a, b in zip(probs, probs[1:]))

    def test_validation(self):
        with pytest.raises(ValueError):
            ClusterFrame((("a", 1),), k=2)
        with pytest.raises(ValueError):
            ClusterFrame((("a", 0),), k=1)
        with pytest.raises(IndexError):
            cluster_share(ClusterFrame((("a", 1),), k=1), 1)

    def test_too_many_draws_from_file(self, fixture_dir):
        with pytest.raises(DataError):
            load_clusters(fixture_dir / "clusters.csv", 9)
