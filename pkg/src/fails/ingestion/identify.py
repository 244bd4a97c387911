"""Map incident component tags and free-form descriptions to service ids."""

from __future__ import annotations

from fails.model import Provider, Registry


def _keyword_hit(keyword: str, haystack: str) -> bool:
    """Case-already-folded substring match on word boundaries.

    A boundary is any position where the neighbouring character is not
    alphanumeric, so "dall·e" matches inside "on DALL·E and" but "api"
    does not match inside "rapid".
    """
    start = 0
    while True:
        idx = haystack.find(keyword, start)
        if idx < 0:
            return False
        before = haystack[idx - 1] if idx > 0 else " "
        after_idx = idx + len(keyword)
        after = haystack[after_idx] if after_idx < len(haystack) else " "
        if not before.isalnum() and not after.isalnum():
            return True
        start = idx + 1


def identify_services(
    provider: Provider,
    explicit_tags: list[str],
    description: str,
    registry: Registry,
) -> tuple[set[str], bool]:
    """Resolve affected services for one incident of `provider`.

    Union of exact display-name matches over `explicit_tags` and keyword hits
    scanned over `description`. When nothing matches, the incident is treated
    as provider-wide: all of the provider's services, flagged via the second
    return value so callers can record a warning.
    """
    services = registry.services_of(provider.id)
    matched: set[str] = set()

    by_display = {s.display_name.lower(): s.id for s in services}
    for tag in explicit_tags:
        sid = by_display.get(tag.strip().lower())
        if sid:
            matched.add(sid)

    haystack = description.lower()
    for service in services:
        for keyword in service.match_keywords:
            if _keyword_hit(keyword, haystack):
                matched.add(service.id)
                break

    if matched:
        return matched, False
    return {s.id for s in services}, True
