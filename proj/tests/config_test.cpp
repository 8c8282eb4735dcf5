int x_config;
