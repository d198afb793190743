# Router module — sub-command handlers and dispatch
