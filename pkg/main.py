"""
測地角工具箱 - 主程式
將測地角分解到基底 {π, ⟨p⟩_d}，找出角之間的有理關係，並計算多面體的 Dehn 不變量
"""
import argparse
import sys

# 導入模組
from modules.logger import setup_logger, get_logger
from modules.config import Config
from modules.errors import GeodeticError, InconsistencyError, ParseError
from modules.basis_angles import basis_table
from modules.decomposer import decompose, parse_angle
from modules.splitting import find_relations, mq_from_text, parse_sum, split_angle
from modules.dehn import DehnVector, dehn_invariant, equidecomposable, parse_group, table3
from modules.report_generator import (
    render_basis,
    render_combo,
    render_dehn,
    render_error,
    render_relations,
    render_split,
    render_table3,
)

# 初始化日誌
setup_logger()
logger = get_logger(__name__)


class _Parser(argparse.ArgumentParser):
    """參數錯誤改丟 ParseError，讓結束碼與錯誤格式一致"""

    def error(self, message):
        raise ParseError(message)


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--precision", type=int, default=None, help="區間運算精度（bits，至少 64）")
    common.add_argument("--factor-limit", type=int, default=None, help="因數分解可處理的最大合成數餘因子")
    common.add_argument("--json", action="store_true", help="輸出 JSON")

    parser = _Parser(prog="geodetic", description="測地角分解、角關係與 Dehn 不變量")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("basis", parents=[common], help="基底角 ⟨p⟩_d 表格")
    p.add_argument("--p-max", type=int, default=31)
    p.add_argument("--d-max", type=int, default=10)

    p = sub.add_parser("decompose", parents=[common], help="分解一個純測地角")
    p.add_argument("angle")

    p = sub.add_parser("split", parents=[common], help="分裂正切為多重二次數的角")
    p.add_argument("tangent")

    p = sub.add_parser("relate", parents=[common], help="找出角之間的有理關係")
    p.add_argument("angles", nargs="+")

    p = sub.add_parser("dehn", parents=[common], help="多面體的 Dehn 不變量與剪拼判定")
    p.add_argument("polyhedra", nargs="+", help="內建名稱或 JSON 檔；可用 a+2*b 組合")
    p.add_argument("--sum", action="store_true", help="輸出所有多面體的 Dehn 不變量總和")

    sub.add_parser("table3", parents=[common], help="單位邊長阿基米德多面體的 Dehn 不變量")
    return parser


# ===== 子指令 =====

def cmd_basis(args, config: Config) -> str:
    df = basis_table(args.p_max, args.d_max)
    return render_basis(df, config.output == "json")


def cmd_decompose(args, config: Config) -> str:
    theta = parse_angle(args.angle)
    combo = decompose(theta, config.precision_bits, config.factor_limit)
    logger.info(f"✅ {theta} 分解完成")
    return render_combo(theta, combo, config.output == "json")


def cmd_split(args, config: Config) -> str:
    tanval = mq_from_text(args.tangent)
    result = split_angle(tanval, config.precision_bits)
    return render_split(tanval, result, config.output == "json")


def cmd_relate(args, config: Config) -> str:
    sums = [parse_sum(text) for text in args.angles]
    relations = find_relations(sums, config.precision_bits, config.factor_limit)
    return render_relations(sums, relations, config.output == "json")


def _group_vector(group) -> DehnVector:
    total = DehnVector()
    for mult, P in group:
        total = total + dehn_invariant(P).scale(mult)
    return total


def cmd_dehn(args, config: Config) -> str:
    groups = [parse_group(text) for text in args.polyhedra]
    as_json = config.output == "json"

    if args.sum:
        rows = [(P.name if mult == 1 else f"{mult}*{P.name}", dehn_invariant(P).scale(mult))
                for group in groups for mult, P in group]
        total = DehnVector()
        for _, v in rows:
            total = total + v
        return render_dehn(rows, total=total, as_json=as_json)

    rows = [(text, _group_vector(group)) for text, group in zip(args.polyhedra, groups)]
    verdict = equidecomposable(groups[0], groups[1]) if len(groups) == 2 else None
    return render_dehn(rows, verdict=verdict, as_json=as_json)


def cmd_table3(args, config: Config) -> str:
    return render_table3(table3(), config.output == "json")


COMMANDS = {
    "basis": cmd_basis,
    "decompose": cmd_decompose,
    "split": cmd_split,
    "relate": cmd_relate,
    "dehn": cmd_dehn,
    "table3": cmd_table3,
}


def main(argv=None) -> int:
    """
    執行一次指令

    Args:
        argv: 參數列表（預設取 sys.argv[1:]）

    Returns:
        int: 結束碼（0 成功，1 解析或定義域錯誤，2 超出資源上限，3 內部錯誤）
    """
    argv = sys.argv[1:] if argv is None else list(argv)
    as_json = "--json" in argv

    try:
        args = build_parser().parse_args(argv)
        config = Config.from_env().with_overrides(
            precision_bits=args.precision,
            factor_limit=args.factor_limit,
            output="json" if args.json else None,
        )
        as_json = config.output == "json"
        output = COMMANDS[args.command](args, config)
    except GeodeticError as e:
        logger.error(f"❌ {e.kind}: {e.detail}")
        if as_json:
            print(render_error(e, True))
        else:
            print(render_error(e), file=sys.stderr)
        return e.exit_code
    except Exception as e:
        logger.exception(f"❌ 未預期的錯誤：{e}")
        err = InconsistencyError(str(e))
        print(render_error(err, as_json), file=sys.stdout if as_json else sys.stderr)
        return err.exit_code

    print(output)
    return 0


if __name__ == "__main__":
    sys.exit(main())
