"""Main entrypoint for clusterlab."""


def main():
    import clusterlab.cli

    clusterlab.cli.app()


if __name__ == "__main__":
    main()
