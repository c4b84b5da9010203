"""Bit-exact binary snapshots of the model state.

Container layout: 4-byte magic, little-endian u32 version, a tagged tree
payload, and a trailing CRC32 of the payload.  All floats round-trip as raw
IEEE doubles, so save -> load reproduces every numeric field exactly.
"""

from __future__ import annotations

import io
import struct
import zlib

import numpy as np

from .config import HyperParams
from .errors import CorruptSnapshotError, VersionMismatchError
from .model import ModelState, PPlusStats, Rule, RunningStats

MAGIC = b"RCSN"
VERSION = 1


# ---------------------------------------------------------------------------
# tagged tree encoding

def _write_value(buf: io.BytesIO, value) -> None:
    if value is None:
        buf.write(b"N")
    elif isinstance(value, bool):
        buf.write(b"B" + (b"\x01" if value else b"\x00"))
    elif isinstance(value, (int, np.integer)):
        value = int(value)
        raw = value.to_bytes((value.bit_length() + 8) // 8 + 1, "little", signed=True)
        buf.write(b"I" + struct.pack("<I", len(raw)) + raw)
    elif isinstance(value, (float, np.floating)):
        buf.write(b"F" + struct.pack("<d", float(value)))
    elif isinstance(value, str):
        raw = value.encode("utf-8")
        buf.write(b"S" + struct.pack("<I", len(raw)) + raw)
    elif isinstance(value, np.ndarray):
        if value.dtype == np.float64:
            code = b"d"
        elif value.dtype == np.int64:
            code = b"q"
        else:
            raise TypeError(f"unsupported array dtype {value.dtype}")
        buf.write(b"A" + code + struct.pack("<B", value.ndim))
        for dim in value.shape:
            buf.write(struct.pack("<Q", dim))
        buf.write(np.ascontiguousarray(value).tobytes())
    elif isinstance(value, (list, tuple)):
        buf.write(b"L" + struct.pack("<I", len(value)))
        for item in value:
            _write_value(buf, item)
    elif isinstance(value, dict):
        buf.write(b"D" + struct.pack("<I", len(value)))
        for key, item in value.items():
            if not isinstance(key, str):
                raise TypeError("dict keys must be strings")
            raw = key.encode("utf-8")
            buf.write(struct.pack("<I", len(raw)) + raw)
            _write_value(buf, item)
    else:
        raise TypeError(f"unsupported snapshot value type {type(value)!r}")


def _read_exact(buf: io.BytesIO, n: int) -> bytes:
    raw = buf.read(n)
    if len(raw) != n:
        raise CorruptSnapshotError("truncated payload")
    return raw


def _read_value(buf: io.BytesIO):
    tag = _read_exact(buf, 1)
    if tag == b"N":
        return None
    if tag == b"B":
        return _read_exact(buf, 1) == b"\x01"
    if tag == b"I":
        (length,) = struct.unpack("<I", _read_exact(buf, 4))
        return int.from_bytes(_read_exact(buf, length), "little", signed=True)
    if tag == b"F":
        return struct.unpack("<d", _read_exact(buf, 8))[0]
    if tag == b"S":
        (length,) = struct.unpack("<I", _read_exact(buf, 4))
        return _read_exact(buf, length).decode("utf-8")
    if tag == b"A":
        code = _read_exact(buf, 1)
        dtype = {b"d": np.float64, b"q": np.int64}.get(code)
        if dtype is None:
            raise CorruptSnapshotError(f"unknown array code {code!r}")
        (ndim,) = struct.unpack("<B", _read_exact(buf, 1))
        shape = tuple(struct.unpack("<Q", _read_exact(buf, 8))[0] for _ in range(ndim))
        count = int(np.prod(shape)) if shape else 1
        raw = _read_exact(buf, count * np.dtype(dtype).itemsize)
        return np.frombuffer(raw, dtype=dtype).reshape(shape).copy()
    if tag == b"L":
        (count,) = struct.unpack("<I", _read_exact(buf, 4))
        return [_read_value(buf) for _ in range(count)]
    if tag == b"D":
        (count,) = struct.unpack("<I", _read_exact(buf, 4))
        out = {}
        for _ in range(count):
            (klen,) = struct.unpack("<I", _read_exact(buf, 4))
            key = _read_exact(buf, klen).decode("utf-8")
            out[key] = _read_value(buf)
        return out
    raise CorruptSnapshotError(f"unknown tag {tag!r}")


# ---------------------------------------------------------------------------
# model <-> tree

def _stats_tree(stats: RunningStats) -> dict:
    return {"mean": stats.mean, "var": stats.var, "n_obs": stats.n_obs,
            "below_streak": stats.below_streak}


def _stats_from(tree: dict) -> RunningStats:
    return RunningStats(mean=tree["mean"], var=tree["var"], n_obs=tree["n_obs"],
                        below_streak=tree["below_streak"])


def _rule_tree(rule: Rule) -> dict:
    return {
        "centroid": rule.centroid,
        "inv_cov": rule.inv_cov,
        "out_weights": rule.out_weights,
        "rec_weights": rule.rec_weights,
        "out_cov": rule.out_cov,
        "support": rule.support,
        "class_support": rule.class_support,
        "prev_temporal": rule.prev_temporal,
        "pplus": {
            "value": rule.pplus.value,
            "prev_value": rule.pplus.prev_value,
            "n_obs": rule.pplus.n_obs,
            "prune_value": rule.pplus.prune_value,
            "history": _stats_tree(rule.pplus.history),
        },
        "ers": _stats_tree(rule.ers),
    }


def _rule_from(tree: dict) -> Rule:
    pp = tree["pplus"]
    return Rule(
        centroid=tree["centroid"],
        inv_cov=tree["inv_cov"],
        out_weights=tree["out_weights"],
        rec_weights=tree["rec_weights"],
        out_cov=tree["out_cov"],
        support=tree["support"],
        class_support=tree["class_support"],
        prev_temporal=tree["prev_temporal"],
        pplus=PPlusStats(value=pp["value"], prev_value=pp["prev_value"],
                         history=_stats_from(pp["history"]), n_obs=pp["n_obs"],
                         prune_value=pp["prune_value"]),
        ers=_stats_from(tree["ers"]),
    )


def model_to_tree(model: ModelState) -> dict:
    sel = model.selection
    fw = model.fweights
    zd = model.zedm
    dq = model.dq
    cp = model.class_potential
    rng_state = fw.rng.bit_generator.state
    return {
        "n_features": model.n_features,
        "n_classes": model.n_classes,
        "n_seen": model.n_seen,
        "config": {k: getattr(model.config, k)
                   for k in HyperParams.__dataclass_fields__},
        "rules": [_rule_tree(r) for r in model.rules],
        "archive": [_rule_tree(r) for r in model.archive],
        "selection": {
            "theta": sel.theta, "budget": sel.budget, "window": sel.window,
            "step": sel.step, "n_classes": sel.n_classes,
            "annot_window": sel.annot_window, "spent": sel.spent,
            "class_counts": sel.class_counts, "n_queried": sel.n_queried,
        },
        "fweights": {
            "omega": fw.omega, "class_means": fw.class_means,
            "global_mean": fw.global_mean, "scatter": fw.scatter,
            "class_counts": fw.class_counts.astype(np.int64),
            "total": fw.total, "weights": fw.weights,
            "use_class_mean": fw.use_class_mean,
            "rng_state": rng_state,
        },
        "zedm": {"eta": zd.eta, "a_acc": zd.a_acc, "f0_prev": zd.f0_prev,
                 "n": zd.n, "terms": zd.terms},
        "dq": {"u_acc": dq.u_acc, "alpha_acc": dq.alpha_acc, "c_acc": dq.c_acc,
               "prev_dq": dq.prev_dq, "prev_x": dq.prev_x, "n": dq.n,
               "clipped": dq.clipped},
        "class_potential": {"sq_norms": cp.sq_norms, "sums": cp.sums,
                            "counts": cp.counts.astype(np.int64)},
    }


def model_from_tree(tree: dict) -> ModelState:
    config = HyperParams(**tree["config"])
    model = ModelState(tree["n_features"], tree["n_classes"], config)
    model.n_seen = tree["n_seen"]
    model.rules = [_rule_from(t) for t in tree["rules"]]
    model.archive = [_rule_from(t) for t in tree["archive"]]

    sel = model.selection
    st = tree["selection"]
    sel.theta, sel.budget, sel.window = st["theta"], st["budget"], st["window"]
    sel.step, sel.n_classes = st["step"], st["n_classes"]
    sel.annot_window, sel.spent = st["annot_window"], st["spent"]
    sel.class_counts = st["class_counts"]
    sel.n_queried = st["n_queried"]

    fw = model.fweights
    ft = tree["fweights"]
    fw.omega, fw.class_means = ft["omega"], ft["class_means"]
    fw.global_mean, fw.scatter = ft["global_mean"], ft["scatter"]
    fw.class_counts = ft["class_counts"].astype(int)
    fw.total, fw.weights = ft["total"], ft["weights"]
    fw.use_class_mean = ft["use_class_mean"]
    fw.rng.bit_generator.state = ft["rng_state"]

    zd, zt = model.zedm, tree["zedm"]
    zd.eta, zd.a_acc, zd.f0_prev = zt["eta"], zt["a_acc"], zt["f0_prev"]
    zd.n, zd.terms = zt["n"], zt["terms"]

    dq, dt = model.dq, tree["dq"]
    dq.u_acc, dq.alpha_acc, dq.c_acc = dt["u_acc"], dt["alpha_acc"], dt["c_acc"]
    dq.prev_dq, dq.prev_x = dt["prev_dq"], dt["prev_x"]
    dq.n, dq.clipped = dt["n"], dt["clipped"]

    cp, ct = model.class_potential, tree["class_potential"]
    cp.sq_norms, cp.sums = ct["sq_norms"], ct["sums"]
    cp.counts = ct["counts"].astype(int)
    return model


# ---------------------------------------------------------------------------
# container i/o

def snapshot_save(model: ModelState, path: str) -> None:
    buf = io.BytesIO()
    _write_value(buf, model_to_tree(model))
    payload = buf.getvalue()
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<I", VERSION))
        fh.write(payload)
        fh.write(struct.pack("<I", zlib.crc32(payload) & 0xFFFFFFFF))


def snapshot_load(path: str) -> ModelState:
    with open(path, "rb") as fh:
        blob = fh.read()
    if len(blob) < len(MAGIC) + 8:
        raise CorruptSnapshotError("file too short")
    if blob[:4] != MAGIC:
        raise CorruptSnapshotError("bad magic")
    (version,) = struct.unpack("<I", blob[4:8])
    if version != VERSION:
        raise VersionMismatchError(f"snapshot version {version}, expected {VERSION}")
    payload, (crc,) = blob[8:-4], struct.unpack("<I", blob[-4:])
    if zlib.crc32(payload) & 0xFFFFFFFF != crc:
        raise CorruptSnapshotError("checksum mismatch")
    buf = io.BytesIO(payload)
    tree = _read_value(buf)
    if buf.read(1):
        raise CorruptSnapshotError("trailing payload bytes")
    return model_from_tree(tree)
