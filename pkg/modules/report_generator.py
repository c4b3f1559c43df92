"""
報表生成模組 - 將計算結果轉成純文字或 JSON

所有輸出都是決定性的：相同的輸入得到逐位元組相同的字串。
"""
import json

import pandas as pd

from .basis_angles import STATUS_MARKERS
from .logger import get_logger

logger = get_logger(__name__)


def _dumps(payload) -> str:
    return json.dumps(payload, ensure_ascii=False, sort_keys=True)


# ===== 基底角表格 =====

def _basis_cell(row) -> str:
    if row["status"] in STATUS_MARKERS:
        return STATUS_MARKERS[row["status"]]
    suffix = "" if int(row["s"]) == 1 else f" /{int(row['s'])}"
    return f"{row['radians']}{suffix}"


def render_basis(df: pd.DataFrame, as_json: bool = False) -> str:
    """
    基底角表格

    Args:
        df: basis_table() 的結果
        as_json: True 時輸出每格一筆的 JSON 陣列

    Returns:
        str: 文字模式為 p × d 的格狀表，# 表示惰性，* 表示分歧，/s 標出類的階
    """
    if as_json:
        cells = []
        for _, row in df.iterrows():
            cell = {"p": int(row["p"]), "d": int(row["d"]), "status": row["status"]}
            for col in ("s", "a", "b"):
                cell[col] = None if pd.isna(row[col]) else int(row[col])
            cell["radians"] = None if pd.isna(row["radians"]) else row["radians"]
            cells.append(cell)
        return _dumps(cells)

    view = df.assign(cell=df.apply(_basis_cell, axis=1))
    grid = view.pivot(index="p", columns="d", values="cell")
    grid.index.name = "p\\d"
    grid.columns.name = None
    legend = "# = inert, * = ramified, /s = class order s"
    return grid.to_string() + "\n" + legend


# ===== 分解與分裂 =====

def render_combo(theta, combo, as_json: bool = False) -> str:
    """分解結果：文字為 t=P/Q; <p>_d^k 序列化格式，JSON 另附角度的度分秒"""
    if as_json:
        payload = combo.to_dict()
        payload["angle"] = str(theta)
        payload["degrees"] = theta.degrees
        return _dumps(payload)
    return combo.to_text()


def render_split(tanval, result, as_json: bool = False) -> str:
    """m·α = Σ parts + j·π/2"""
    if as_json:
        return _dumps({
            "tan": str(tanval),
            "m": result.m,
            "j": result.j,
            "parts": [{"n": p.n, "r": str(p.r), "degrees": p.degrees} for p in result.parts],
        })
    lines = [
        f"alpha = arctan({tanval})",
        f"{result.m}*alpha = {' + '.join(str(p) for p in result.parts)} + {result.j}*pi/2",
    ]
    return "\n".join(lines)


def render_relations(angles, relations, as_json: bool = False) -> str:
    """每個關係一行：(c₁, c₂, …) -> kπ；沒有關係時為 independent"""
    if as_json:
        return _dumps({
            "angles": [str(a) for a in angles],
            "relations": [
                {"coefficients": [str(c) for c in r.coefficients], "pi_multiple": str(r.pi_multiple)}
                for r in relations
            ],
        })
    if not relations:
        return "independent"
    lines = []
    for r in relations:
        lines.append(f"({', '.join(str(c) for c in r.coefficients)}) -> {r.pi_multiple}*pi")
    return "\n".join(lines)


# ===== Dehn 不變量 =====

def render_dehn(rows, total=None, verdict=None, as_json: bool = False) -> str:
    """
    Dehn 不變量清單

    Args:
        rows: [(名稱, DehnVector)]
        total: --sum 時的加總向量
        verdict: 兩組多面體比較時的 Verdict
    """
    if as_json:
        payload = {"polyhedra": [{"name": name, "dehn": v.to_dict()} for name, v in rows]}
        if total is not None:
            payload["sum"] = total.to_dict()
        if verdict is not None:
            payload["verdict"] = verdict.to_dict()
        return _dumps(payload)

    lines = [f"{name}: {v.to_text()}" for name, v in rows]
    if total is not None:
        lines.append(f"sum: {total.to_text()}")
    if verdict is not None:
        lines.append(render_verdict(verdict))
    return "\n".join(lines)


def render_verdict(verdict, as_json: bool = False) -> str:
    if as_json:
        return _dumps(verdict.to_dict())
    return (
        f"dehn_equal: {'yes' if verdict.dehn_equal else 'no'}\n"
        f"volume: {verdict.volume_status}\n"
        f"equidecomposable: {verdict.answer}"
    )


def render_table3(rows, as_json: bool = False) -> str:
    """單位邊長多面體的 Dehn 不變量表"""
    if as_json:
        return _dumps([{"name": name, "dehn": v.to_dict()} for name, v in rows])
    df = pd.DataFrame([{"polyhedron": name, "dehn invariant": v.to_text()} for name, v in rows])
    return df.to_string(index=False, justify="left")


# ===== 錯誤 =====

def render_error(err, as_json: bool = False) -> str:
    if as_json:
        return _dumps(err.to_dict())
    return f"error ({err.kind}): {err.detail}"
