"""Versioned binary container for HSS matrices and URV factorizations.

Layout (all integers little-endian)::

    b"HSS1"  u32 version  u32 section_count
    section: 4-byte tag  u64 payload_bytes  payload
    payload: u32 record_count, then records
    record:  u16 name_len  name (utf-8)  u8 dtype  u8 ndim  u64 dims[ndim]  data

Arrays are stored C-ordered with explicit little-endian dtypes, so a reload
reproduces every entry bit for bit.  The ``META`` section holds a single JSON
record with scalar parameters.
"""

import io
import json
import struct

import numpy as np

from .cauchy import CauchySource
from .geometry import NodeSet
from .hss import HssMatrix, HssTree, TreeNode
from .urv import NodeFactor, Reflectors, UrvFactorization

__all__ = [
    "MAGIC",
    "VERSION",
    "ContainerError",
    "write_container",
    "read_container",
    "save_hss",
    "load_hss",
    "save_factorization",
    "load_factorization",
]

MAGIC = b"HSS1"
VERSION = 1

_DTYPES = {1: np.dtype("<f8"), 2: np.dtype("<c16"), 3: np.dtype("<i8"), 4: np.dtype("u1")}
_CODES = {"f": 1, "c": 2, "i": 3, "u": 3, "b": 4}


class ContainerError(ValueError):
    """Malformed or incompatible container file."""


def _dtype_code(a):
    if a.dtype == np.uint8:
        return 4
    try:
        return _CODES[a.dtype.kind]
    except KeyError:
        raise TypeError(f"cannot store arrays of dtype {a.dtype}") from None


def _write_record(buf, name, arr):
    a = np.asarray(arr)
    code = _dtype_code(a)
    a = np.ascontiguousarray(a, dtype=_DTYPES[code])
    key = name.encode("utf-8")
    buf.write(struct.pack("<H", len(key)))
    buf.write(key)
    buf.write(struct.pack("<BB", code, a.ndim))
    buf.write(struct.pack(f"<{a.ndim}Q", *a.shape))
    buf.write(a.tobytes())


def write_container(f, sections):
    """Write ``{tag: {name: array}}`` to the binary file object `f`."""
    f.write(MAGIC)
    f.write(struct.pack("<II", VERSION, len(sections)))
    for tag, records in sections.items():
        tagb = tag.encode("ascii")
        if len(tagb) != 4:
            raise ValueError(f"section tags are 4 bytes, got {tag!r}")
        buf = io.BytesIO()
        buf.write(struct.pack("<I", len(records)))
        for name, arr in records.items():
            _write_record(buf, name, arr)
        payload = buf.getvalue()
        f.write(tagb)
        f.write(struct.pack("<Q", len(payload)))
        f.write(payload)


def _take(view, pos, n):
    if pos + n > len(view):
        raise ContainerError("truncated container")
    return view[pos:pos + n], pos + n


def read_container(f):
    """Inverse of :func:`write_container`."""
    data = f.read()
    view = memoryview(data)
    head, pos = _take(view, 0, 12)
    if bytes(head[:4]) != MAGIC:
        raise ContainerError("not an HSS1 container (bad magic)")
    version, nsec = struct.unpack("<II", head[4:])
    if version != VERSION:
        raise ContainerError(f"unsupported container version {version}")
    sections = {}
    for _ in range(nsec):
        h, pos = _take(view, pos, 12)
        tag = bytes(h[:4]).decode("ascii")
        (size,) = struct.unpack("<Q", h[4:])
        payload, pos = _take(view, pos, size)
        q = 0
        raw, q = _take(payload, q, 4)
        (nrec,) = struct.unpack("<I", raw)
        recs = {}
        for _ in range(nrec):
            raw, q = _take(payload, q, 2)
            (klen,) = struct.unpack("<H", raw)
            raw, q = _take(payload, q, klen)
            name = bytes(raw).decode("utf-8")
            raw, q = _take(payload, q, 2)
            code, ndim = struct.unpack("<BB", raw)
            if code not in _DTYPES:
                raise ContainerError(f"unknown dtype code {code} in record {name!r}")
            raw, q = _take(payload, q, 8 * ndim)
            shape = struct.unpack(f"<{ndim}Q", raw)
            dt = _DTYPES[code]
            nbytes = dt.itemsize * int(np.prod(shape, dtype=np.int64))
            raw, q = _take(payload, q, nbytes)
            recs[name] = np.frombuffer(bytes(raw), dtype=dt).reshape(shape).copy()
        sections[tag] = recs
    return sections


def _json_record(obj):
    return np.frombuffer(json.dumps(obj, sort_keys=True).encode("utf-8"), dtype=np.uint8)


def _json_load(arr):
    return json.loads(bytes(arr).decode("utf-8"))


_NONE = -1


def _tree_table(tree):
    rows = []
    for t, nd in sorted(tree.nodes.items()):
        rows.append([t, nd.rows[0], nd.rows[1], nd.cols[0], nd.cols[1],
                     _NONE if nd.parent is None else nd.parent,
                     _NONE if nd.left is None else nd.left,
                     _NONE if nd.right is None else nd.right])
    return np.array(rows, dtype=np.int64)


def _tree_from_table(tab, shape):
    nodes = {}
    for t, r0, r1, c0, c1, par, lc, rc in tab.tolist():
        nodes[t] = TreeNode(label=t, rows=(r0, r1), cols=(c0, c1),
                            parent=None if par == _NONE else par,
                            left=None if lc == _NONE else lc,
                            right=None if rc == _NONE else rc)
    return HssTree(nodes=nodes, shape=tuple(shape))


def _hss_records(H):
    rec = {"shape": np.array(H.shape, dtype=np.int64), "tree": _tree_table(H.tree)}
    for key in ("D", "U", "V", "R", "W", "S_row", "S_col"):
        for t, a in getattr(H, key).items():
            rec[f"{key}/{t}"] = a
    for t, (blr, brl) in H.B.items():
        rec[f"B_lr/{t}"] = blr
        rec[f"B_rl/{t}"] = brl
    if H.source is not None:
        rec["source/t"] = H.source.t
        rec["source/d"] = H.source.d
        rec["source/n"] = np.array([H.source.n], dtype=np.int64)
    if H.epsilon is not None:
        rec["epsilon"] = np.array([H.epsilon])
    return rec


def _hss_from_records(rec):
    tree = _tree_from_table(rec["tree"], rec["shape"])
    H = HssMatrix(tree=tree)
    blr, brl = {}, {}
    for name, a in rec.items():
        key, _, lab = name.partition("/")
        if key in ("D", "U", "V", "R", "W", "S_row", "S_col"):
            getattr(H, key)[int(lab)] = a
        elif key == "B_lr":
            blr[int(lab)] = a
        elif key == "B_rl":
            brl[int(lab)] = a
    H.B = {t: (blr[t], brl[t]) for t in blr}
    if "source/t" in rec:
        H.source = CauchySource(t=rec["source/t"], d=rec["source/d"], n=int(rec["source/n"][0]))
    if "epsilon" in rec:
        H.epsilon = float(rec["epsilon"][0])
    return H


def save_hss(H, path):
    with open(path, "wb") as f:
        write_container(f, {"META": {"meta": _json_record({"kind": "hss"})}, "HSS1": _hss_records(H)})


def load_hss(path):
    with open(path, "rb") as f:
        sec = read_container(f)
    if "HSS1" not in sec:
        raise ContainerError("container has no HSS1 section")
    return _hss_from_records(sec["HSS1"])


_REFL = ("omega", "P", "Q")
_MATS = ("D11", "D12", "D22", "U1", "U2", "Vbar", "G_lr", "G_rl", "R_l", "R_r")


def _urv_records(F):
    rec = {"shape": np.array(F.shape, dtype=np.int64), "srf": np.array([F.srf])}
    for t, f in F.nodes.items():
        rec[f"{t}/ints"] = np.array([f.rows_in, f.m_tilde, f.kv_bar], dtype=np.int64)
        for name in _REFL:
            r = getattr(f, name)
            if r is not None:
                rec[f"{t}/{name}.qr"] = r.qr
                rec[f"{t}/{name}.tau"] = r.tau
                rec[f"{t}/{name}.m"] = np.array([r.m], dtype=np.int64)
        for name in _MATS:
            a = getattr(f, name)
            if a is not None:
                rec[f"{t}/{name}"] = a
    return rec


def _urv_from_records(rec, tree):
    F = UrvFactorization(tree=tree, shape=tuple(int(s) for s in rec["shape"]), srf=float(rec["srf"][0]))
    labels = sorted({int(k.split("/")[0]) for k in rec if "/" in k})
    for t in labels:
        rows_in, m_tilde, kv_bar = (int(v) for v in rec[f"{t}/ints"])
        f = NodeFactor(rows_in=rows_in, m_tilde=m_tilde, kv_bar=kv_bar)
        for name in _REFL:
            if f"{t}/{name}.qr" in rec:
                setattr(f, name, Reflectors(np.asfortranarray(rec[f"{t}/{name}.qr"]), rec[f"{t}/{name}.tau"],
                                            int(rec[f"{t}/{name}.m"][0])))
        for name in _MATS:
            if f"{t}/{name}" in rec:
                setattr(f, name, rec[f"{t}/{name}"])
        F.nodes[t] = f
    return F


def save_factorization(fact, path):
    """Persist an :class:`~inudft.pipeline.InudftFactorization` (HSS generators, URV factors, node data)."""
    ns = fact.nodes
    hss = _hss_records(fact.hss)
    hss.update({"nodes/p": ns.p, "nodes/perm": ns.perm, "nodes/t": ns.t,
                "nodes/cluster": ns.cluster, "nodes/d": ns.d, "nodes/n": np.array([ns.n], dtype=np.int64),
                "w": fact.w})
    meta = {"kind": "inudft", "m": ns.m, "n": ns.n, "epsilon": fact.epsilon}
    with open(path, "wb") as f:
        write_container(f, {"META": {"meta": _json_record(meta)}, "HSS1": hss, "URV1": _urv_records(fact.urv)})


def load_factorization(path):
    from .pipeline import InudftFactorization

    with open(path, "rb") as f:
        sec = read_container(f)
    for tag in ("META", "HSS1", "URV1"):
        if tag not in sec:
            raise ContainerError(f"container has no {tag} section")
    meta = _json_load(sec["META"]["meta"])
    if meta.get("kind") != "inudft":
        raise ContainerError("container does not hold an inverse-NUDFT factorization")
    rec = sec["HSS1"]
    nodes = NodeSet(p=rec.pop("nodes/p"), perm=rec.pop("nodes/perm"), n=int(rec.pop("nodes/n")[0]),
                    t=rec.pop("nodes/t"), cluster=rec.pop("nodes/cluster"), d=rec.pop("nodes/d"))
    w = rec.pop("w")
    H = _hss_from_records(rec)
    F = _urv_from_records(sec["URV1"], H.tree)
    return InudftFactorization(nodes=nodes, hss=H, urv=F, epsilon=float(meta["epsilon"]), w=w, timings={})
