"""Named experiment presets that regenerate the reference result curves.

Each preset expands to one or more Scenarios; group names bundle every curve of
one study.  Presets only build configurations; run them through
harness.run_sweep (or the CLI's simulate subcommand).
"""

from __future__ import annotations

import math
from dataclasses import replace

from .harness import Scenario
from .metrics import rel_improvement

__all__ = ["PRESETS", "list_presets", "expand_preset", "rel_improvement_table"]

_EVM_SNRS = tuple(float(v) for v in range(10, 41, 2))
_SER_SNRS = tuple(float(v) for v in range(-5, 40, 2))
_FRAME_LENGTHS = (100, 200, 500, 1000, 2000, 5000, 10000)
_SWEEP_NS = (2, 4, 8, 12, 16, 20, 24, 32, 40, 48, 64, 80, 96)


def _evm(sid: str, **kw) -> Scenario:
    base = Scenario(
        scenario_id=sid,
        snr_db=_EVM_SNRS,
        k_db=math.inf,
        csi="perfect",
        trials=600,
    )
    return replace(base, **kw)


def _ser(sid: str, **kw) -> Scenario:
    base = Scenario(
        scenario_id=sid,
        snr_db=_SER_SNRS,
        k_db=10.0,
        csi="training",
        trials=2000,
    )
    return replace(base, **kw)


def _fig2a() -> list[Scenario]:
    return [
        _evm("fig2a-nopn"),
        _evm("fig2a-wiener-ind-1e4", pn_model="wiener", sigma2_delta=1e-4),
        _evm("fig2a-wiener-ind-1e5", pn_model="wiener", sigma2_delta=1e-5),
        _evm("fig2a-wiener-com-1e4", pn_model="wiener", sigma2_delta=1e-4, topology="common-common"),
        _evm("fig2a-stationary-reynolds", pn_model="stationary", mask="reynolds85"),
        _evm("fig2a-stationary-dancila", pn_model="stationary", mask="dancila115"),
    ]


def _fig2b_family(name: str, **kw) -> list[Scenario]:
    out = []
    for l_d in _FRAME_LENGTHS:
        trials = max(100, min(600, 600_000 // l_d))
        out.append(_evm(f"{name}-L{l_d}", snr_db=(25.0,), l_d=l_d, trials=trials, **kw))
    return out


def _fig2b() -> list[Scenario]:
    return _fig2b_family("fig2b-wiener-ind-1e4", pn_model="wiener", sigma2_delta=1e-4) + _fig2b_family(
        "fig2b-stationary-reynolds", pn_model="stationary", mask="reynolds85"
    )


def _fig3a() -> list[Scenario]:
    return [
        _ser("fig3a-nopn"),
        _ser("fig3a-wiener-ind", pn_model="wiener", sigma2_delta=1e-4),
        _ser("fig3a-wiener-ind-1e5", pn_model="wiener", sigma2_delta=1e-5),
        _ser("fig3a-wiener-com", pn_model="wiener", sigma2_delta=1e-4, topology="common-common"),
        _ser("fig3a-stationary-reynolds", pn_model="stationary", mask="reynolds85"),
    ]


def _fig3b() -> list[Scenario]:
    out = []
    for cname in ("PSK8", "QAM16", "PSK16", "QAM64"):
        for s2, tag in ((1e-4, "1e4"), (1e-5, "1e5")):
            out.append(
                _ser(
                    f"fig3b-{cname.lower()}-{tag}",
                    constellation=cname,
                    pn_model="wiener",
                    sigma2_delta=s2,
                )
            )
    return out


def _fig4a() -> list[Scenario]:
    comp = dict(pn_model="wiener", compensation=True)
    return [
        _ser("fig4a-com-1e4-plain", pn_model="wiener", sigma2_delta=1e-4, topology="common-common"),
        _ser("fig4a-com-1e4-comp", sigma2_delta=1e-4, topology="common-common", **comp),
        _ser("fig4a-ind-1e4-comp", sigma2_delta=1e-4, **comp),
        _ser("fig4a-ind-1e5-comp", sigma2_delta=1e-5, **comp),
    ]


def _fig4b() -> list[Scenario]:
    families = (
        ("com-1e4", "common-common", 1e-4),
        ("indcom-1e4", "individual-common", 1e-4),
        ("ind-1e4", "individual-individual", 1e-4),
        ("ind-1e5", "individual-individual", 1e-5),
    )
    out = []
    for tag, top, s2 in families:
        for n in _SWEEP_NS:
            for comp in (False, True):
                out.append(
                    _ser(
                        f"fig4b-{tag}-n{n}-{'comp' if comp else 'plain'}",
                        n=n,
                        snr_db=(25.0,),
                        pn_model="wiener",
                        sigma2_delta=s2,
                        topology=top,
                        compensation=comp,
                        trials=200,
                    )
                )
    return out


PRESETS = {
    "fig2a": _fig2a,
    "fig2b": _fig2b,
    "fig3a": _fig3a,
    "fig3b": _fig3b,
    "fig4a": _fig4a,
    "fig4b": _fig4b,
}


def list_presets() -> list[str]:
    names = set(PRESETS)
    for group, builder in PRESETS.items():
        names.update(s.scenario_id for s in builder())
    return sorted(names)


def expand_preset(name: str) -> list[Scenario]:
    """Scenarios for a group name ('fig3a') or a single curve ('fig3a-nopn')."""
    key = name.strip().lower()
    if key in PRESETS:
        return PRESETS[key]()
    for group, builder in PRESETS.items():
        if key.startswith(group):
            hits = [s for s in builder() if s.scenario_id == key]
            if hits:
                return hits
    raise ValueError(f"unknown preset {name!r}; available: {', '.join(sorted(PRESETS))}")


def rel_improvement_table(rows) -> list[dict]:
    """Pair plain/comp sweep rows by (scenario family, N, SNR) and tabulate.

    Works on rows produced by the fig4b preset (ids ending -plain / -comp).
    """
    plain, comp = {}, {}
    for r in rows:
        sid = r.scenario_id
        if sid.endswith("-plain"):
            plain[(sid[: -len("-plain")], r.snr_db)] = r
        elif sid.endswith("-comp"):
            comp[(sid[: -len("-comp")], r.snr_db)] = r
    table = []
    for key in sorted(plain.keys() & comp.keys(), key=lambda t: (t[0], t[1])):
        p, c = plain[key], comp[key]
        table.append(
            {
                "family": key[0],
                "n": p.n,
                "topology": p.topology,
                "snr_db": p.snr_db,
                "ser_plain": p.ser,
                "ser_comp": c.ser,
                "rel_improvement": rel_improvement(p.ser, c.ser),
            }
        )
    return table
