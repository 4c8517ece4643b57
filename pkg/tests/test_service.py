import json
import math

import pytest
from fastapi.testclient import TestClient

from movepoly.problem_io import problem_to_dict
from movepoly.service import app

from helpers import guard_heavy_problem, parameter_gap_problem

client = TestClient(app)


def gap_problem_payload():
    return problem_to_dict(parameter_gap_problem())


class TestBasics:
    def test_health(self):
        response = client.get("/healthz")
        assert response.status_code == 200
        assert response.json() == {"status": "ok"}

    def test_scenario_listing(self):
        response = client.get("/scenarios")
        assert response.status_code == 200
        names = {row["name"] for row in response.json()["scenarios"]}
        assert "paper-example" in names


class TestProjectEndpoint:
    def test_scenario_projection(self):
        response = client.post("/project", json={
            "scenario": "paper-example", "p": [1.0, 1.0], "w": [1.0, 2.0]})
        assert response.status_code == 200
        body = response.json()
        assert body["schema"] == "movepoly-report/1"
        assert body["command"] == "project"
        assert body["status"] == "converged"
        assert body["point"] == [0.0, 0.0]
        assert body["distance"] == pytest.approx(math.sqrt(5.0), rel=1e-12)
        assert body["active"] == [1, 2, 3]
        assert body["kkt_residual"] <= 1e-9
        certificate = body["certificate"]
        assert certificate["equality_support"] == [1, 2]
        assert certificate["coefficients"] == pytest.approx([1.0, 2.0])

    def test_inline_problem(self):
        payload = gap_problem_payload()
        response = client.post("/project", json={
            "problem": payload, "p": [0.0], "w": [3.0]})
        assert response.status_code == 200
        body = response.json()
        assert body["status"] == "converged"
        assert body["point"] == [0.0]

    def test_infeasible_slice_is_reported_in_band(self):
        response = client.post("/project", json={
            "problem": gap_problem_payload(), "p": [0.5], "w": [1.0]})
        assert response.status_code == 200
        body = response.json()
        assert body["status"] == "infeasible_set"
        assert body["point"] is None

    def test_byte_determinism(self):
        request = {"scenario": "paper-example", "p": [0.25, 0.25],
                   "w": [0.5, 1.0]}
        first = client.post("/project", json=request)
        second = client.post("/project", json=request)
        assert first.content == second.content

    def test_reports_parse_as_json_with_newline(self):
        response = client.post("/project", json={
            "scenario": "paper-example", "p": [1.0, 1.0], "w": [1.0, 2.0]})
        assert response.content.endswith(b"\n")
        json.loads(response.content)

    def test_problem_and_scenario_together_are_rejected(self):
        response = client.post("/project", json={
            "problem": gap_problem_payload(), "scenario": "paper-example",
            "p": [0.0], "w": [0.0]})
        assert response.status_code == 422

    def test_neither_source_is_rejected(self):
        response = client.post("/project", json={"p": [0.0], "w": [0.0]})
        assert response.status_code == 422

    def test_extra_fields_are_rejected(self):
        response = client.post("/project", json={
            "scenario": "paper-example", "p": [0.0, 0.0], "w": [0.0, 0.0],
            "bogus": 1})
        assert response.status_code == 422

    def test_wrong_vector_length_is_an_input_error(self):
        response = client.post("/project", json={
            "scenario": "paper-example", "p": [1.0], "w": [1.0, 2.0]})
        assert response.status_code == 400
        assert response.json()["error"]["code"] == "input"

    def test_unknown_scenario_is_an_input_error(self):
        response = client.post("/project", json={
            "scenario": "nope", "p": [0.0], "w": [0.0]})
        assert response.status_code == 400
        body = response.json()
        assert body["error"]["code"] == "input"
        assert "nope" in body["error"]["message"]


class TestMultipliersEndpoint:
    def test_normalized_and_minimal_blocks(self):
        response = client.post("/multipliers", json={
            "scenario": "paper-example", "p": [1.0, 1.0], "w": [1.0, 2.0]})
        assert response.status_code == 200
        body = response.json()
        assert body["command"] == "multipliers"
        certificate = body["certificate"]
        assert certificate["equality_support"] == [1, 2]
        assert certificate["coefficients"] == pytest.approx([1.0, 2.0])
        minimal = body["min_l1"]
        assert minimal["value"] == pytest.approx(2.0 / math.sqrt(5.0),
                                                 rel=1e-9)
        normalized = body["normalized_multipliers"]
        assert len(normalized) == 3

    def test_feasible_query_has_no_normalized_blocks(self):
        response = client.post("/multipliers", json={
            "scenario": "paper-example", "p": [1.0, 1.0], "w": [0.0, 0.0]})
        assert response.status_code == 200
        body = response.json()
        assert body["status"] == "converged"
        assert body["normalized_multipliers"] is None
        assert body["min_l1"] is None


class TestAnalysisEndpoints:
    def test_rcrcq(self):
        response = client.post("/check-rcrcq", json={
            "scenario": "paper-example", "seed": 0, "samples": 100})
        assert response.status_code == 200
        body = response.json()
        assert body["command"] == "check-rcrcq"
        assert body["verdict"] == "holds"
        assert {tuple(row["subset"]) for row in body["subsets"]} \
            == {(1, 2), (1, 2, 3)}

    def test_liminf(self):
        response = client.post("/check-liminf", json={
            "scenario": "paper-example", "samples": 100})
        assert response.status_code == 200
        assert response.json()["verdict"] == "consistent with liminf"

    def test_estimate(self):
        response = client.post("/estimate", json={
            "scenario": "paper-example", "samples": 100})
        assert response.status_code == 200
        body = response.json()
        assert body["command"] == "estimate"
        assert body["two_m_bound_ok"] is True
        assert body["verdict"].startswith("consistent with Lipschitz-like")
        assert body["config"]["samples"] == 100

    def test_blowup_with_builtin_sequence(self):
        response = client.post("/blowup", json={
            "scenario": "paper-example", "policy": "fixed:2,3", "kmax": 5})
        assert response.status_code == 200
        body = response.json()
        rows = body["rows"]
        assert len(rows) == 5
        assert rows[4]["multipliers"][2] == pytest.approx(
            25.0 / math.sqrt(5.0), rel=1e-9)
        assert body["config"]["sequence"] == "approach"

    def test_blowup_with_explicit_points(self):
        response = client.post("/blowup", json={
            "scenario": "paper-example", "policy": "reduced",
            "points": [{"p": [1.0, 1.0], "w": [1.0, 2.0]},
                       {"p": [0.25, 0.25], "w": [0.5, 1.0]}]})
        assert response.status_code == 200
        body = response.json()
        assert body["config"]["sequence"] == "explicit"
        assert [row["l1_norm"] for row in body["rows"]] == pytest.approx(
            [3.0 / math.sqrt(5.0)] * 2, rel=1e-9)

    def test_blowup_without_any_sequence(self):
        response = client.post("/blowup", json={
            "problem": gap_problem_payload(), "policy": "reduced"})
        assert response.status_code == 400
        assert response.json()["error"]["code"] == "input"

    def test_blowup_bad_policy(self):
        response = client.post("/blowup", json={
            "scenario": "paper-example", "policy": "banana"})
        assert response.status_code == 400
        assert response.json()["error"]["code"] == "input"


class TestErrorCodes:
    def test_infeasible_sequence_point(self):
        response = client.post("/blowup", json={
            "problem": gap_problem_payload(), "policy": "reduced",
            "points": [{"p": [0.5], "w": [1.0]}]})
        assert response.status_code == 400
        assert response.json()["error"]["code"] == "infeasible"

    def test_enumeration_guard(self):
        payload = problem_to_dict(guard_heavy_problem(13))
        response = client.post("/check-rcrcq", json={
            "problem": payload, "samples": 5})
        assert response.status_code == 400
        assert response.json()["error"]["code"] == "guard"

    def test_sampling_diagnostic(self):
        payload = gap_problem_payload()
        # point radius so small that no projected point is retained
        response = client.post("/estimate", json={
            "problem": payload, "samples": 20, "point_radius": 1e-9})
        assert response.status_code == 400
        assert response.json()["error"]["code"] in ("sampling", "infeasible")

    def test_tolerance_overrides_are_applied(self):
        response = client.post("/project", json={
            "scenario": "paper-example", "p": [1.0, 1.0], "w": [1.0, 2.0],
            "tolerances": {"feasibility": 1e-6}})
        assert response.status_code == 200
        body = response.json()
        assert body["config"]["tolerances"]["feasibility"] \
            == pytest.approx(1e-6)
