#pragma once

// Pairs of scripts that are equivalent under the normal form: alias renames,
// conjunct permutations, CTE inlining and inner-join input swaps, all over
// the fixture warehouse schema.

#include <string>
#include <vector>

struct EquivalentPair {
  std::string relation;
  std::string left;
  std::string right;
};

inline std::vector<EquivalentPair> equivalent_pairs() {
  return {
      {"alias rename", "SELECT o.order_id, o.amount FROM dwd_orders o WHERE o.amount > 100",
       "SELECT ord.order_id, ord.amount FROM dwd_orders ord WHERE ord.amount > 100"},
      {"alias rename",
       "SELECT u.city, count(*) AS n FROM dwd_orders o JOIN dim_users u ON o.user_id = u.user_id GROUP BY u.city",
       "SELECT usr.city, count(*) AS order_cnt FROM dwd_orders x JOIN dim_users usr ON x.user_id = usr.user_id "
       "GROUP BY usr.city"},
      {"alias rename", "SELECT s.shop_id AS id FROM dim_shops s", "SELECT shop_id AS shop FROM dim_shops"},
      {"conjunct permutation", "SELECT order_id FROM dwd_orders WHERE amount > 10 AND status = 'paid'",
       "SELECT order_id FROM dwd_orders WHERE status = 'paid' AND amount > 10"},
      {"conjunct permutation",
       "SELECT order_id FROM dwd_orders WHERE channel = 'app' AND amount > 10 AND dt = '2024-01-01'",
       "SELECT order_id FROM dwd_orders WHERE dt = '2024-01-01' AND (amount > 10 AND channel = 'app')"},
      {"conjunct permutation",
       "SELECT user_id FROM dim_users WHERE (city = 'Paris' OR city = 'Lyon') AND level >= 2",
       "SELECT user_id FROM dim_users WHERE level >= 2 AND (city = 'Lyon' OR city = 'Paris')"},
      {"conjunct permutation",
       "SELECT o.order_id FROM dwd_orders o JOIN dim_users u ON o.user_id = u.user_id AND u.level > 1",
       "SELECT o.order_id FROM dwd_orders o JOIN dim_users u ON u.level > 1 AND u.user_id = o.user_id"},
      {"cte inlining",
       "WITH paid AS (SELECT order_id, amount FROM dwd_orders WHERE status = 'paid') SELECT order_id FROM paid",
       "SELECT order_id FROM dwd_orders WHERE status = 'paid'"},
      {"cte inlining",
       "WITH big AS (SELECT user_id, amount FROM dwd_orders WHERE amount > 100) "
       "SELECT user_id, sum(amount) AS total FROM big GROUP BY user_id",
       "SELECT user_id, sum(amount) AS total FROM dwd_orders WHERE amount > 100 GROUP BY user_id"},
      {"cte inlining", "WITH u AS (SELECT * FROM dim_users) SELECT user_id, city FROM u",
       "SELECT user_id, city FROM dim_users"},
      {"inner join swap",
       "SELECT o.order_id, u.city FROM dwd_orders o JOIN dim_users u ON o.user_id = u.user_id",
       "SELECT o.order_id, u.city FROM dim_users u JOIN dwd_orders o ON u.user_id = o.user_id"},
      {"inner join swap",
       "SELECT s.shop_name, sum(o.amount) AS gmv FROM dwd_orders o INNER JOIN dim_shops s ON o.shop_id = s.shop_id "
       "GROUP BY s.shop_name",
       "SELECT s.shop_name, sum(o.amount) AS gmv FROM dim_shops s INNER JOIN dwd_orders o ON s.shop_id = o.shop_id "
       "GROUP BY s.shop_name"},
      {"inner join swap",
       "SELECT p.pay_method, o.channel FROM dwd_orders o JOIN dwd_payments p ON o.order_id = p.order_id "
       "WHERE p.pay_amount > 0",
       "SELECT p.pay_method, o.channel FROM dwd_payments p JOIN dwd_orders o ON p.order_id = o.order_id "
       "WHERE p.pay_amount > 0"},
  };
}
