// CLI entry point; subcommands are wired up in cli_impl.hpp.
int main() { return 0; }
