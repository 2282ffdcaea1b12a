import pytest

from config import Status
from errors import OutputError
from state import AuditEntry, RunState
from tools.manifest_tools import MANIFEST_NAME, list_runs, load_manifest, run_dir, save_manifest


def _saved_state(**kwargs) -> RunState:
    state = RunState(command="matrices", scenario_path="scenarios/unidirectional_pair.json", seed=7, **kwargs)
    run_dir(state.run_id, create=True)
    state.status = Status.DONE
    state.add_output("C.csv")
    state.add_output("C.csv")
    state.reports["matrices"] = {"identity_passed": True}
    state.log("matrices", duration_ms=12)
    save_manifest(state)
    return state


def test_run_dir_when_exists_should_refuse_unless_allowed(output_dir):
    run_dir("abc", create=True)
    with pytest.raises(OutputError):
        run_dir("abc", create=True)
    assert run_dir("abc", create=True, exist_ok=True).is_dir()


def test_save_manifest_when_loaded_should_restore_state(output_dir):
    state = _saved_state()
    loaded = load_manifest(state.run_id)
    assert (output_dir / state.run_id / MANIFEST_NAME).exists()
    assert loaded.to_dict() == state.to_dict()
    assert loaded.outputs == ["C.csv"]
    assert isinstance(loaded.audit_trail[0], AuditEntry)


def test_load_manifest_when_run_unknown_should_return_none(output_dir):
    assert load_manifest("nope") is None


def test_load_manifest_when_corrupt_should_raise(output_dir):
    run_dir("broken", create=True)
    (output_dir / "broken" / MANIFEST_NAME).write_text("{not json", encoding="utf-8")
    with pytest.raises(OutputError):
        load_manifest("broken")


def test_list_runs_when_runs_saved_should_summarize_each(output_dir):
    state = _saved_state()
    run_dir("no-manifest", create=True)
    runs = list_runs()
    assert len(runs) == 1
    assert runs[0]["run_id"] == state.run_id
    assert runs[0]["command"] == "matrices" and runs[0]["seed"] == 7 and runs[0]["outputs"] == 1
    assert runs[0]["scenario"] == "unidirectional_pair.json"


def test_list_runs_when_output_root_missing_should_be_empty(output_dir):
    assert list_runs() == []


def test_run_state_when_manifest_has_unknown_keys_should_drop_them():
    data = RunState(command="oracle").to_dict()
    data["added_in_a_later_version"] = 1
    assert RunState.from_dict(data).command == "oracle"
