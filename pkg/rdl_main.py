from __future__ import annotations

"""
rdl 命令行入口脚本（项目根目录运行）。

用法：
    python rdl_main.py simulate --preset five_defendants_10 --out out/paths.csv
    python rdl_main.py cohort --config scenario.json --format json
    python rdl_main.py score --events events.jsonl --age 21 --as-of 2024-06-15

等价于 `python -m cli ...`。
"""

from cli.main import run

if __name__ == "__main__":
    run()
