// Placeholder; the CLI is assembled once the compute modules are in place.
int main() { return 0; }
