import pytest
from hypothesis import given
from hypothesis import strategies as st

from monitored_code.pauli_core import DimensionError, PauliString
from monitored_code.schedule import (
    MeasurementSchedule,
    ScheduleParseError,
    dumps,
    loads,
    read_schedule,
    write_schedule,
)


@st.composite
def canonical_texts(draw):
    n = draw(st.integers(1, 6))
    body = st.text(alphabet="IXYZ", min_size=n, max_size=n).filter(lambda s: set(s) != {"I"})
    ops = draw(st.lists(st.tuples(st.sampled_from("+-"), body), max_size=10))
    return f"n={n}\n" + "".join(sign + letters + "\n" for sign, letters in ops)


@given(canonical_texts())
def test_canonical_text_round_trips_byte_for_byte(text):
    assert dumps(loads(text)) == text


def test_comments_and_blank_lines_are_skipped():
    text = "# a comment\n\nn=2\n# between ops\n+XX\n  -ZZ  \n"
    sched = loads(text)
    assert [str(p) for p in sched] == ["+XX", "-ZZ"]
    assert dumps(sched) == "n=2\n+XX\n-ZZ\n"


@pytest.mark.parametrize("text, line", [
    ("+XX\n", 1),
    ("n=two\n", 1),
    ("n=2\n+XQ\n", 2),
    ("n=2\nXX\n", 2),
    ("n=2\n+XXX\n", 2),
    ("# c\nn=2\n+XX\n+II\n", 4),
    ("n=0\n", 1),
])
def test_parse_errors_carry_line_numbers(text, line):
    with pytest.raises(ScheduleParseError) as err:
        loads(text)
    assert err.value.line == line
    assert f"line {line}" in str(err.value)


def test_missing_header():
    with pytest.raises(ScheduleParseError):
        loads("# only comments\n")


def test_schedule_validation():
    with pytest.raises(ValueError):
        MeasurementSchedule.from_strings(["+iXZ"])
    with pytest.raises(DimensionError):
        MeasurementSchedule(2, (PauliString.from_str("X"),))
    with pytest.raises(ValueError):
        MeasurementSchedule(1, (PauliString.identity(1),))


def test_file_round_trip(tmp_path):
    sched = MeasurementSchedule.from_strings(["+XXI", "-ZZX", "+YZZ"])
    path = tmp_path / "s.txt"
    write_schedule(sched, path)
    assert path.read_text() == "n=3\n+XXI\n-ZZX\n+YZZ\n"
    assert read_schedule(path) == sched


def test_suffix_and_prepend():
    sched = MeasurementSchedule.from_strings(["+XX", "+ZZ", "+XI"])
    assert [str(p) for p in sched.suffix(2)] == ["+ZZ", "+XI"]
    assert sched.suffix(0).tau == 0
    assert sched.prepend([PauliString.from_str("+IZ")])[0] == PauliString.from_str("IZ")
