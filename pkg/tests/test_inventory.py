"""Inventory parsing, validation, round-trip, and pair selection."""

import pytest
from hypothesis import given, strategies as st

from ranloop import inventory
from ranloop.errors import EmptyInventory, ValidationError
from ranloop.inventory import Inventory, LinkDecl, UeDecl, load_inventory, select_pair, serialize


class TestGoldenInventory:
    def test_parses(self, inventory_text):
        inv = load_inventory(inventory_text)
        assert [u.id for u in inv.ues] == ["sierra_ue", "samsung_ue"]
        assert inv.plmn == "00105"
        assert inv.ues[0].plmn == "00105"
        assert inv.ues[1].plmn is None

    def test_links(self, inventory_text):
        inv = load_inventory(inventory_text)
        by_cell = {l.cell_id: l for l in inv.links}
        assert set(by_cell) == {"foxconn01", "foxconn02"}
        close = by_cell["foxconn01"]
        assert (close.distance_class, close.avg_rsrp_dBm, close.ru_attn_dB) == (
            "close", -75.0, 10.0,
        )
        far = by_cell["foxconn02"]
        assert (far.distance_class, far.avg_rsrp_dBm, far.ru_attn_dB) == (
            "far", -110.0, 10.0,
        )

    def test_cells_derived_in_declaration_order(self, inventory_text):
        inv = load_inventory(inventory_text)
        assert [c.id for c in inv.cells] == ["foxconn01", "foxconn02"]
        assert not inv.explicit_cells

    def test_round_trips_by_value(self, inventory_text):
        inv = load_inventory(inventory_text)
        assert load_inventory(serialize(inv)) == inv

    def test_select_pair_strongest(self, inventory_text):
        inv = load_inventory(inventory_text)
        assert select_pair(inv, "strongest") == ("sierra_ue", "foxconn01")

    def test_select_pair_weakest(self, inventory_text):
        inv = load_inventory(inventory_text)
        assert select_pair(inv, "weakest") == ("sierra_ue", "foxconn02")


def _doc(link_body=("distance: close", "avg_rsrp_dBm: -75", "ru_attn_dB: 10")):
    body = "\n".join(f"          {line}" for line in link_body)
    return (
        "- ue1\n"
        '    - plmn: "00105"\n'
        "    - cell1:\n"
        f"{body}\n"
    )


class TestValidation:
    def test_bad_plmn(self):
        with pytest.raises(ValidationError):
            load_inventory('- ue1\n    - plmn: "12"\n')

    def test_plmn_digit_count_bounds(self):
        load_inventory('- ue1\n    - plmn: "12345"\n')
        load_inventory('- ue1\n    - plmn: "123456"\n')
        with pytest.raises(ValidationError):
            load_inventory('- ue1\n    - plmn: "1234567"\n')

    def test_conflicting_plmns(self):
        text = '- ue1\n    - plmn: "00105"\n- ue2\n    - plmn: "00106"\n'
        with pytest.raises(ValidationError):
            load_inventory(text)

    def test_rsrp_out_of_range(self):
        for bad in (-30, -157):
            body = ("distance: close", f"avg_rsrp_dBm: {bad}", "ru_attn_dB: 10")
            with pytest.raises(ValidationError):
                load_inventory(_doc(body))

    def test_negative_attenuation(self):
        body = ("distance: close", "avg_rsrp_dBm: -75", "ru_attn_dB: -1")
        with pytest.raises(ValidationError):
            load_inventory(_doc(body))

    def test_unknown_distance_class(self):
        body = ("distance: medium", "avg_rsrp_dBm: -75", "ru_attn_dB: 10")
        with pytest.raises(ValidationError):
            load_inventory(_doc(body))

    def test_missing_link_key(self):
        with pytest.raises(ValidationError):
            load_inventory(_doc(("distance: close", "avg_rsrp_dBm: -75")))

    def test_unknown_link_key(self):
        body = ("distance: close", "avg_rsrp_dBm: -75", "ru_attn_dB: 10", "extra: 1")
        with pytest.raises(ValidationError):
            load_inventory(_doc(body))

    def test_duplicate_ue(self):
        with pytest.raises(ValidationError):
            load_inventory("- ue1\n- ue1\n")

    def test_duplicate_link(self):
        text = _doc() + "    - cell1:\n          distance: far\n          avg_rsrp_dBm: -100\n          ru_attn_dB: 0\n"
        with pytest.raises(ValidationError):
            load_inventory(text)

    def test_explicit_cells_reject_dangling_link(self):
        text = "- cells:\n    - cellX\n" + _doc()
        with pytest.raises(ValidationError) as exc:
            load_inventory(text)
        assert "undeclared cell" in str(exc.value)

    def test_explicit_cells_accepted(self):
        text = "- cells:\n    - cell1\n    - cell2\n" + _doc()
        inv = load_inventory(text)
        assert inv.explicit_cells
        assert [c.id for c in inv.cells] == ["cell1", "cell2"]
        assert load_inventory(serialize(inv)) == inv

    def test_empty_inventory_is_valid(self):
        inv = load_inventory("")
        assert inv.ues == () and inv.links == ()

    def test_select_pair_empty_raises(self):
        with pytest.raises(EmptyInventory):
            select_pair(load_inventory(""))

    def test_select_pair_unknown_policy(self, inventory_text):
        with pytest.raises(ValueError):
            select_pair(load_inventory(inventory_text), "median")


ids = st.from_regex(r"[a-z][a-z0-9_]{0,7}", fullmatch=True)
rsrps = st.floats(min_value=-156, max_value=-31).map(lambda x: round(x, 1))


@st.composite
def inventories(draw):
    ue_ids = draw(st.lists(ids, min_size=1, max_size=4, unique=True))
    cell_ids = draw(st.lists(ids, min_size=1, max_size=4, unique=True))
    ues = tuple(UeDecl(u, None) for u in ue_ids)
    links = []
    for u in ue_ids:
        for c in draw(st.sets(st.sampled_from(cell_ids))):
            links.append(
                LinkDecl(
                    u, c, draw(st.sampled_from(inventory.DISTANCE_CLASSES)),
                    draw(rsrps), float(draw(st.integers(0, 40))),
                )
            )
    cells = []
    for link in links:
        if link.cell_id not in cells:
            cells.append(link.cell_id)
    return Inventory(None, ues, tuple(inventory.CellDecl(c) for c in cells), tuple(links))


@given(inventories())
def test_serialize_round_trips_by_value(inv):
    assert load_inventory(serialize(inv)) == inv


@given(inventories())
def test_select_pair_is_extreme_with_lexicographic_ties(inv):
    if not inv.links:
        return
    ue, cell = select_pair(inv, "strongest")
    best = max(l.avg_rsrp_dBm for l in inv.links)
    chosen = [l for l in inv.links if (l.ue_id, l.cell_id) == (ue, cell)]
    assert chosen[0].avg_rsrp_dBm == best
    ties = sorted(
        (l.ue_id, l.cell_id) for l in inv.links if l.avg_rsrp_dBm == best
    )
    assert (ue, cell) == ties[0]
