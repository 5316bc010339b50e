import pytest

from codeco import load_demo_grammar


@pytest.fixture(scope="session")
def demo():
    return load_demo_grammar("demo")


@pytest.fixture(scope="session")
def demo_core():
    return load_demo_grammar("demo_core")


def feed_all(state, tokens):
    from codeco.parser import feed_token

    for token in tokens:
        state = feed_token(state, token)
    return state


def token_set(options):
    return {opt.token for opt in options}
