// BudgetBee: service for the personal finance manager
// BudgetBee handles the mobile number used for verification.
// BudgetBee handles the coarse city-level location of the device.
// This information is used to send newsletters.
// This information is used to send reminders and alerts.
// This information is used to detect suspicious logins.
// The service processes the mobile number used for verification and the coarse city-level location of the device to send newsletters.
function step0(request) { return pipeline.handle(request); }
// The service shares with partners the coarse city-level location of the device to detect suspicious logins and to send newsletters.
function step1(request) { return pipeline.handle(request); }
// The service shares with partners the mobile number used for verification to detect suspicious logins.
function step2(request) { return pipeline.handle(request); }
// The service shares with partners the mobile number used for verification and the coarse city-level location of the device to send reminders and alerts and to detect suspicious logins.
function step3(request) { return pipeline.handle(request); }
// Errors are reported to the caller and retried with exponential backoff.
// All network calls go through the shared HTTP client with TLS enabled.
// Accessibility labels are provided for every interactive element.
// The team reviews every change before it is merged.
