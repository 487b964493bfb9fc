"""处理命令行与 YAML 配置项的解析和校验。"""

from __future__ import annotations

from typing import Any, List, Optional, Sequence


class ConfigError(ValueError):
    """配置解析错误。"""


def _text(value: Any) -> Optional[str]:
    if value is None:
        return None
    return str(value).strip()


def parse_bool(value: Any, field: str, default: bool = False) -> bool:
    if isinstance(value, bool):
        return value
    text = _text(value)
    if text is None or text == "":
        return default
    if text in {"是", "true", "True", "1", "yes", "YES", "on"}:
        return True
    if text in {"否", "false", "False", "0", "no", "NO", "off"}:
        return False
    raise ConfigError(f"{field}参数无效，只能填写'是'或'否'")


def parse_float(
    value: Any,
    field: str,
    default: Optional[float] = None,
    min_value: Optional[float] = None,
    max_value: Optional[float] = None,
) -> Optional[float]:
    text = _text(value)
    if text is None or text == "":
        return default
    try:
        number = float(text)
    except ValueError as exc:
        raise ConfigError(f"{field}参数必须是数字") from exc

    if min_value is not None and number < min_value:
        raise ConfigError(f"{field}参数不能小于{min_value}")
    if max_value is not None and number > max_value:
        raise ConfigError(f"{field}参数不能大于{max_value}")
    return number


def parse_int(
    value: Any,
    field: str,
    default: Optional[int] = None,
    min_value: Optional[int] = None,
    max_value: Optional[int] = None,
) -> Optional[int]:
    text = _text(value)
    if text is None or text == "":
        return default
    try:
        number = int(text)
    except ValueError as exc:
        raise ConfigError(f"{field}参数必须是整数") from exc

    if min_value is not None and number < min_value:
        raise ConfigError(f"{field}参数不能小于{min_value}")
    if max_value is not None and number > max_value:
        raise ConfigError(f"{field}参数不能大于{max_value}")
    return number


def parse_choice(value: Any, field: str, choices: Sequence[str], default: str) -> str:
    text = _text(value)
    if text is None or text == "":
        return default
    if text not in choices:
        raise ConfigError(f"{field}参数无效，可选值: {', '.join(choices)}")
    return text


def parse_snr_list(value: Any, field: str = "snr") -> List[float]:
    """解析 "0,2,4" 形式的字符串或 YAML 列表。"""
    if isinstance(value, (list, tuple)):
        items = [str(item) for item in value]
    else:
        text = _text(value) or ""
        items = [part for part in text.replace("，", ",").split(",")]
    items = [item.strip() for item in items if item.strip()]
    if not items:
        raise ConfigError(f"{field}列表不能为空")
    return [parse_float(item, field) for item in items]  # type: ignore[misc]
