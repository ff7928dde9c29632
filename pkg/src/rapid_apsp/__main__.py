"""
RAPID APSP - 命令行入口

python -m rapid_apsp 与 rapid-apsp 命令等价。
"""

from rapid_apsp.cli import app


def main() -> None:
    app(prog_name="rapid-apsp")


if __name__ == "__main__":
    main()
