int x_cli;
